"""Typed AST for parsed `.odd` modules.

All nodes are frozen dataclasses; declaration order is preserved in every
sequence field. `structurally_equal` compares two trees while ignoring
source locations, which parse-render-reparse round trips cannot preserve.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum, auto
from typing import Union

from .source import SourceSpan

Literal = Union[float, str, bool]


@dataclass(frozen=True)
class ConstRef:
    """A by-name reference to a module constant."""

    name: str
    span: SourceSpan


@dataclass(frozen=True)
class ConstDecl:
    name: str
    value: Literal
    span: SourceSpan


@dataclass(frozen=True)
class TypeAliasDecl:
    """A closed string enumeration (`typealias X = "a" | "b"`)."""

    name: str
    alternatives: tuple[str, ...]
    span: SourceSpan


@dataclass(frozen=True)
class TypeRef:
    """Name of a declared type: a builtin, a local class/alias, or
    `imported_module.Name`."""

    name: str
    span: SourceSpan


class ConstraintKind(Enum):
    IS_BETWEEN = auto()


@dataclass(frozen=True)
class ConstraintExpr:
    """An inclusive numeric range check attached to a Float property.

    `source_text` is the constraint exactly as written in the source; it is
    quoted verbatim in diagnostics.
    """

    kind: ConstraintKind
    low: Union[float, ConstRef]
    high: Union[float, ConstRef]
    source_text: str
    span: SourceSpan


@dataclass(frozen=True)
class PropertyDecl:
    name: str
    declared_type: TypeRef
    constraint: ConstraintExpr | None
    default: Union[Literal, ConstRef, None]
    span: SourceSpan

    @property
    def has_default(self) -> bool:
        return self.default is not None


@dataclass(frozen=True)
class ClassDecl:
    name: str
    properties: tuple[PropertyDecl, ...]
    span: SourceSpan

    def find_property(self, name: str) -> PropertyDecl | None:
        for prop in self.properties:
            if prop.name == name:
                return prop
        return None


@dataclass(frozen=True)
class AmendmentEntry:
    """One override inside an amendment block: either a leaf literal or a
    nested block for an object-typed property."""

    name: str
    value: Union[Literal, "AmendmentBlock"]
    span: SourceSpan


@dataclass(frozen=True)
class AmendmentBlock:
    entries: tuple[AmendmentEntry, ...]

    def find(self, name: str) -> AmendmentEntry | None:
        for entry in self.entries:
            if entry.name == name:
                return entry
        return None


EMPTY_AMENDMENT = AmendmentBlock(entries=())


@dataclass(frozen=True)
class InstanceDecl:
    name: str
    target_type: str
    amendment: AmendmentBlock
    span: SourceSpan


@dataclass(frozen=True)
class ModuleAst:
    """One parsed source file."""

    module_name: str
    min_tool_version: str | None
    imports: tuple[str, ...]
    consts: tuple[ConstDecl, ...]
    type_aliases: tuple[TypeAliasDecl, ...]
    classes: tuple[ClassDecl, ...]
    instances: tuple[InstanceDecl, ...]
    file_uri: str = ""
    source_text: str = ""
    import_spans: tuple[SourceSpan, ...] = ()

    def find_class(self, name: str) -> ClassDecl | None:
        for cls in self.classes:
            if cls.name == name:
                return cls
        return None

    def find_alias(self, name: str) -> TypeAliasDecl | None:
        for alias in self.type_aliases:
            if alias.name == name:
                return alias
        return None

    def find_instance(self, name: str) -> InstanceDecl | None:
        for inst in self.instances:
            if inst.name == name:
                return inst
        return None

    def source_line(self, line: int) -> str | None:
        """The 1-based source line, if the module kept its source text."""
        if not self.source_text:
            return None
        lines = self.source_text.splitlines()
        if 1 <= line <= len(lines):
            return lines[line - 1]
        return None


_NON_STRUCTURAL_FIELDS = frozenset({"file_uri", "source_text", "import_spans"})


def _structural_key(node: object) -> object:
    if dataclasses.is_dataclass(node) and not isinstance(node, type):
        if isinstance(node, SourceSpan):
            return ()
        parts: list[object] = [type(node).__name__]
        for field in dataclasses.fields(node):
            if field.name in _NON_STRUCTURAL_FIELDS:
                continue
            parts.append(_structural_key(getattr(node, field.name)))
        return tuple(parts)
    if isinstance(node, tuple):
        return tuple(_structural_key(item) for item in node)
    return node


def structurally_equal(a: object, b: object) -> bool:
    """Equality over AST content, ignoring spans and retained source text."""
    return _structural_key(a) == _structural_key(b)


def _render_literal(value: Literal) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _render_default(value: Union[Literal, ConstRef]) -> str:
    if isinstance(value, ConstRef):
        return value.name
    return _render_literal(value)


def _render_amendment(block: AmendmentBlock, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    for entry in block.entries:
        if isinstance(entry.value, AmendmentBlock):
            out.append(f"{pad}{entry.name} {{")
            _render_amendment(entry.value, indent + 1, out)
            out.append(f"{pad}}}")
        else:
            out.append(f"{pad}{entry.name} = {_render_literal(entry.value)}")


def render_source(module: ModuleAst) -> str:
    """Debug printer: canonical source whose reparse is structurally equal."""
    out: list[str] = []
    if module.min_tool_version is not None:
        out.append(f'@ModuleInfo {{ minToolVersion = "{module.min_tool_version}" }}')
    if module.module_name:
        out.append(f"module {module.module_name}")
    if out:
        out.append("")
    for imp in module.imports:
        out.append(f'import "{imp}"')
    if module.imports:
        out.append("")
    for const in module.consts:
        out.append(f"const {const.name} = {_render_literal(const.value)}")
    for alias in module.type_aliases:
        alts = " | ".join(_render_literal(alt) for alt in alias.alternatives)
        out.append(f"typealias {alias.name} = {alts}")
    for cls in module.classes:
        out.append("")
        out.append(f"class {cls.name} {{")
        for prop in cls.properties:
            line = f"  {prop.name} : {prop.declared_type.name}"
            if prop.constraint is not None:
                line += f" ({prop.constraint.source_text})"
            if prop.default is not None:
                line += f" = {_render_default(prop.default)}"
            out.append(line)
        out.append("}")
    for inst in module.instances:
        out.append("")
        out.append(f"{inst.name} : {inst.target_type} = new {{")
        _render_amendment(inst.amendment, 1, out)
        out.append("}")
    return "\n".join(out) + "\n"
