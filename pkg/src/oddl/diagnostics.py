"""Violations, evaluation results, and the diagnostic text renderer."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto
from typing import TYPE_CHECKING

from .source import SourceSpan
from .values import ObjectValue

if TYPE_CHECKING:  # pragma: no cover
    from .imports import ModuleGraph


class ViolationKind(Enum):
    CONSTRAINT_VIOLATED = auto()
    UNKNOWN_PROPERTY = auto()
    TYPE_MISMATCH = auto()
    MISSING_REQUIRED = auto()
    VERSION_GATE = auto()
    ENUM_OUT_OF_RANGE = auto()
    PROBABILITY_RANGE = auto()


@dataclass(frozen=True)
class Violation:
    """A single diagnosed defect.

    `property_path` is the dotted path inside the instance being evaluated;
    `decl_site` points at the property declaration in the template and
    `use_site`, when present, at the amendment that supplied the value.
    """

    kind: ViolationKind
    message: str
    property_path: str = ""
    offending_value: str | None = None
    constraint_text: str | None = None
    decl_site: SourceSpan | None = None
    use_site: SourceSpan | None = None
    module_name: str = ""
    class_name: str = ""
    property_name: str = ""
    constraint_span: SourceSpan | None = None
    decl_module_key: str = ""

    def __post_init__(self) -> None:
        if self.kind is ViolationKind.CONSTRAINT_VIOLATED:
            if self.constraint_text is None or self.offending_value is None:
                raise ValueError(
                    "constraint violations must carry constraint_text and offending_value"
                )


@dataclass(frozen=True)
class EvalResult:
    """Either a fully evaluated tree or a non-empty list of violations."""

    value: ObjectValue | None
    violations: tuple[Violation, ...] = ()

    def __post_init__(self) -> None:
        if (self.value is None) == (not self.violations):
            raise ValueError("exactly one of value / violations must be set")

    @property
    def ok(self) -> bool:
        return self.value is not None

    @staticmethod
    def success(value: ObjectValue) -> "EvalResult":
        return EvalResult(value=value)

    @staticmethod
    def failure(violations: tuple[Violation, ...]) -> "EvalResult":
        return EvalResult(value=None, violations=tuple(violations))


def _location_line(violation: Violation) -> str | None:
    if violation.decl_site is None:
        return None
    where = ""
    if violation.class_name and violation.property_name:
        where = f"{violation.module_name}#{violation.class_name}.{violation.property_name}"
    elif violation.module_name:
        where = violation.module_name
    return f"at {where} {violation.decl_site.describe()}"


def render_violation(violation: Violation, graph: "ModuleGraph | None" = None) -> str:
    """Human-readable diagnostic block for one violation.

    Constraint violations follow the fixed shape:

        Type constraint '<text>' violated.
        Value: <value>

        <line> | <source line>
                ^^^^^^^^^^^^^^
        at <module>#<Class>.<property> (<file-uri>, line <N>)
    """
    lines = [violation.message]
    if violation.offending_value is not None:
        lines.append(f"Value: {violation.offending_value}")
    if violation.kind is not ViolationKind.CONSTRAINT_VIOLATED and violation.property_path:
        lines.append(f"Property: {violation.property_path}")
    location = _location_line(violation)
    if location is None:
        return "\n".join(lines)
    lines.append("")
    source_line = None
    if graph is not None and violation.decl_module_key in graph.modules:
        module = graph.modules[violation.decl_module_key]
        source_line = module.source_line(violation.decl_site.line)
    if source_line is not None:
        prefix = f"{violation.decl_site.line} | "
        lines.append(prefix + source_line.rstrip())
        caret_span = violation.constraint_span
        if caret_span is not None and caret_span.line == violation.decl_site.line:
            room = max(len(source_line) - (caret_span.column - 1), 1)
            width = min(caret_span.length, room)
            lines.append(" " * (len(prefix) + caret_span.column - 1) + "^" * width)
    lines.append(location)
    return "\n".join(lines)
