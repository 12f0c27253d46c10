"""Scenario membership, domain containment, and attribute-level diff.

A profile decides what a configured value *means* per attribute path: an
upper bound (LEQ), an exact value (EQ / EQ_TOLERANCE), a lower bound (GEQ),
the schema range itself (RANGE), or an inclusion flag (FLAG_INCLUSION).
The standard profile treats speed limits as upper bounds, lane dimensions
as exact within 1e-9, every boolean taxonomy flag as an inclusion flag,
and enumerations as exact.

Listings carry no membership semantics and are skipped by `scenario_within`
and `contains`; `diff` still reports them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum, auto
from pathlib import Path
from typing import Iterable, NamedTuple

from .source import ProfileError, ScenarioError, ShapeMismatchError
from .values import (
    BoolValue,
    EnumValue,
    FloatValue,
    LeafValue,
    ListingValue,
    ObjectValue,
    Scalar,
    StringValue,
    format_float,
    format_scalar,
    iter_leaves,
    leaf_scalar,
    resolve_path,
)


class ComparatorKind(Enum):
    EQ = auto()
    EQ_TOLERANCE = auto()
    LEQ = auto()
    GEQ = auto()
    RANGE = auto()
    FLAG_INCLUSION = auto()


@dataclass(frozen=True)
class Comparator:
    kind: ComparatorKind
    tolerance: float = 0.0

    def __post_init__(self) -> None:
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")


EQ = Comparator(ComparatorKind.EQ)
LEQ = Comparator(ComparatorKind.LEQ)
GEQ = Comparator(ComparatorKind.GEQ)
RANGE = Comparator(ComparatorKind.RANGE)
FLAG_INCLUSION = Comparator(ComparatorKind.FLAG_INCLUSION)


def eq_tolerance(epsilon: float) -> Comparator:
    return Comparator(ComparatorKind.EQ_TOLERANCE, tolerance=epsilon)


class Outcome(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    UNRESOLVED = "UNRESOLVED"


class PathResult(NamedTuple):
    path: str
    outcome: Outcome
    reason: str


@dataclass(frozen=True)
class Verdict:
    within: bool
    per_path: tuple[PathResult, ...]

    def to_json_dict(self) -> dict:
        return {
            "within": self.within,
            "per_path": [
                {"path": r.path, "outcome": r.outcome.value, "reason": r.reason}
                for r in self.per_path
            ],
        }


@dataclass(frozen=True)
class ContainmentReport:
    contains: bool
    per_path: tuple[PathResult, ...]

    def to_json_dict(self) -> dict:
        return {
            "contains": self.contains,
            "per_path": [
                {"path": r.path, "outcome": r.outcome.value, "reason": r.reason}
                for r in self.per_path
            ],
        }


class DiffEntry(NamedTuple):
    path: str
    a: object
    b: object


@dataclass(frozen=True)
class Scenario:
    """A flat assignment of attribute paths to observed scalar values."""

    assignments: tuple[tuple[str, Scalar], ...]

    @classmethod
    def from_mapping(cls, mapping: dict) -> "Scenario":
        items: list[tuple[str, Scalar]] = []
        seen: set[str] = set()
        for path, value in mapping.items():
            if not isinstance(path, str):
                raise ScenarioError(f"scenario paths must be strings, got {path!r}")
            if path in seen:
                raise ScenarioError(f"duplicate scenario path '{path}'")
            seen.add(path)
            if isinstance(value, bool):
                items.append((path, value))
            elif isinstance(value, (int, float)):
                items.append((path, float(value)))
            elif isinstance(value, str):
                items.append((path, value))
            else:
                raise ScenarioError(
                    f"scenario value for '{path}' must be a number, boolean, "
                    f"or string, got {value!r}"
                )
        return cls(assignments=tuple(items))

    def items(self) -> Iterable[tuple[str, Scalar]]:
        return self.assignments


def load_scenario(path: Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must be a JSON object of path -> value")
    return Scenario.from_mapping(data)


@dataclass(frozen=True)
class AnalysisProfile:
    """Per-path comparator declarations plus per-type defaults.

    Patterns are exact dotted paths or suffix wildcards (`*.speed_limit`,
    `*.lane_type.bus_lane`); the most specific match wins and ties between
    distinct patterns are a configuration error.
    """

    comparators: tuple[tuple[str, Comparator], ...] = ()
    default_float: Comparator = EQ
    default_bool: Comparator = FLAG_INCLUSION
    default_enum: Comparator = EQ

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for pattern, _ in self.comparators:
            if pattern in seen:
                raise ProfileError(
                    f"pattern '{pattern}' is declared twice; every leaf path "
                    "must match exactly one comparator"
                )
            seen.add(pattern)

    def comparator_for(self, path: str, leaf: LeafValue) -> Comparator | None:
        best: tuple[int, str, Comparator] | None = None
        tied: str | None = None
        for pattern, comparator in self.comparators:
            rank = _match_rank(pattern, path)
            if rank is None:
                continue
            if best is None or rank > best[0]:
                best = (rank, pattern, comparator)
                tied = None
            elif rank == best[0] and pattern != best[1]:
                tied = pattern
        if best is not None:
            if tied is not None:
                raise ProfileError(
                    f"profile patterns '{best[1]}' and '{tied}' are equally "
                    f"specific for path '{path}'"
                )
            return best[2]
        if isinstance(leaf, FloatValue):
            return self.default_float
        if isinstance(leaf, BoolValue):
            return self.default_bool
        if isinstance(leaf, (EnumValue, StringValue)):
            return self.default_enum
        return None  # listings have no comparator


def _match_rank(pattern: str, path: str) -> int | None:
    """Specificity of a pattern match, or None. Exact paths outrank any
    suffix wildcard; longer suffixes outrank shorter ones."""
    if pattern == path:
        return 1_000_000
    if pattern.startswith("*."):
        suffix = pattern[2:]
        if path == suffix or path.endswith("." + suffix):
            return len(suffix.split("."))
    return None


def standard_profile() -> AnalysisProfile:
    """The shipped profile for the bundled ISO 34503 taxonomy."""
    return AnalysisProfile(
        comparators=(
            ("*.speed_limit", LEQ),
            ("*.lane_dimension", eq_tolerance(1e-9)),
        ),
        default_float=EQ,
        default_bool=FLAG_INCLUSION,
        default_enum=EQ,
    )


_KIND_NAMES = {
    "eq": ComparatorKind.EQ,
    "eq_tolerance": ComparatorKind.EQ_TOLERANCE,
    "leq": ComparatorKind.LEQ,
    "geq": ComparatorKind.GEQ,
    "range": ComparatorKind.RANGE,
    "flag_inclusion": ComparatorKind.FLAG_INCLUSION,
}


def _parse_comparator(descriptor: object, context: str) -> Comparator:
    if isinstance(descriptor, str):
        name, payload = descriptor, {}
    elif isinstance(descriptor, dict):
        name = descriptor.get("kind", "")
        payload = descriptor
    else:
        raise ProfileError(f"bad comparator descriptor for {context}: {descriptor!r}")
    kind = _KIND_NAMES.get(str(name).lower())
    if kind is None:
        raise ProfileError(
            f"unknown comparator kind {name!r} for {context} "
            f"(expected one of {', '.join(_KIND_NAMES)})"
        )
    tolerance = payload.get("tolerance", 0.0) if isinstance(payload, dict) else 0.0
    if not isinstance(tolerance, (int, float)) or isinstance(tolerance, bool) or tolerance < 0:
        raise ProfileError(f"bad tolerance for {context}: {tolerance!r}")
    return Comparator(kind, tolerance=float(tolerance))


def load_profile(path: Path) -> AnalysisProfile:
    """Read a profile file: pattern -> descriptor, plus optional `defaults`."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileError(f"malformed profile JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProfileError("profile file must be a JSON object")
    base = standard_profile()
    defaults = {
        "float": base.default_float,
        "bool": base.default_bool,
        "enum": base.default_enum,
    }
    declared_defaults = data.get("defaults", {})
    if not isinstance(declared_defaults, dict):
        raise ProfileError("'defaults' must be an object")
    for type_name, descriptor in declared_defaults.items():
        if type_name not in defaults:
            raise ProfileError(f"unknown default type {type_name!r}")
        defaults[type_name] = _parse_comparator(descriptor, f"defaults.{type_name}")
    comparators = tuple(
        (pattern, _parse_comparator(descriptor, f"pattern '{pattern}'"))
        for pattern, descriptor in data.items()
        if pattern != "defaults"
    )
    return AnalysisProfile(
        comparators=comparators,
        default_float=defaults["float"],
        default_bool=defaults["bool"],
        default_enum=defaults["enum"],
    )


# -- scenario membership -----------------------------------------------------


def _within_one(
    leaf: LeafValue, scenario_value: Scalar, comparator: Comparator
) -> tuple[Outcome, str]:
    kind = comparator.kind
    if kind is ComparatorKind.FLAG_INCLUSION:
        if not isinstance(leaf, BoolValue) or not isinstance(scenario_value, bool):
            return Outcome.FAIL, "flag comparison needs boolean values on both sides"
        if scenario_value and not leaf.value:
            return Outcome.FAIL, "scenario asserts a condition the domain excludes"
        return Outcome.PASS, "flag admitted"
    if kind in (ComparatorKind.LEQ, ComparatorKind.GEQ, ComparatorKind.RANGE) or (
        kind is ComparatorKind.EQ_TOLERANCE
    ):
        if isinstance(leaf, FloatValue) and isinstance(scenario_value, float):
            return _within_numeric(leaf, scenario_value, comparator)
        if kind is ComparatorKind.EQ_TOLERANCE:
            # Degenerate but total: non-numeric values fall back to equality.
            return _within_equality(leaf, scenario_value)
        return Outcome.FAIL, "numeric comparison needs numeric values on both sides"
    return _within_equality(leaf, scenario_value)


def _within_numeric(
    leaf: FloatValue, s: float, comparator: Comparator
) -> tuple[Outcome, str]:
    o = leaf.value
    kind = comparator.kind
    if kind is ComparatorKind.LEQ:
        if leaf.low is not None and s < leaf.low:
            return Outcome.FAIL, f"{format_float(s)} < lower bound {format_float(leaf.low)}"
        if s > o:
            return Outcome.FAIL, f"{format_float(s)} > {format_float(o)}"
        return Outcome.PASS, f"{format_float(s)} <= {format_float(o)}"
    if kind is ComparatorKind.GEQ:
        if leaf.high is not None and s > leaf.high:
            return Outcome.FAIL, f"{format_float(s)} > upper bound {format_float(leaf.high)}"
        if s < o:
            return Outcome.FAIL, f"{format_float(s)} < {format_float(o)}"
        return Outcome.PASS, f"{format_float(s)} >= {format_float(o)}"
    if kind is ComparatorKind.RANGE:
        if leaf.low is not None and s < leaf.low:
            return Outcome.FAIL, f"{format_float(s)} < range low {format_float(leaf.low)}"
        if leaf.high is not None and s > leaf.high:
            return Outcome.FAIL, f"{format_float(s)} > range high {format_float(leaf.high)}"
        return Outcome.PASS, "within declared range"
    # EQ_TOLERANCE
    if abs(s - o) <= comparator.tolerance:
        return Outcome.PASS, f"|{format_float(s)} - {format_float(o)}| <= {comparator.tolerance!r}"
    return Outcome.FAIL, f"|{format_float(s)} - {format_float(o)}| > {comparator.tolerance!r}"


def _within_equality(leaf: LeafValue, s: Scalar) -> tuple[Outcome, str]:
    o = leaf_scalar(leaf)
    if type(s) is not type(o):
        return Outcome.FAIL, f"expected a value like {format_scalar(o)}, got {format_scalar(s)}"
    if s == o:
        return Outcome.PASS, f"{format_scalar(s)} == {format_scalar(o)}"
    return Outcome.FAIL, f"{format_scalar(s)} != {format_scalar(o)}"


def scenario_within(
    odd: ObjectValue, scenario: Scenario, profile: AnalysisProfile | None = None
) -> Verdict:
    """Check whether a concrete scenario stays inside the evaluated domain.

    Paths the scenario does not assign are unconstrained; paths that do not
    resolve come back UNRESOLVED rather than failing the whole check.
    """
    profile = profile if profile is not None else standard_profile()
    results: list[PathResult] = []
    for path, scenario_value in scenario.items():
        node = resolve_path(odd, path)
        if node is None:
            results.append(
                PathResult(path, Outcome.UNRESOLVED, "path does not resolve in this domain")
            )
            continue
        if isinstance(node, ObjectValue):
            results.append(
                PathResult(path, Outcome.UNRESOLVED, "path names an object, not an attribute")
            )
            continue
        if isinstance(node, ListingValue):
            results.append(
                PathResult(
                    path, Outcome.UNRESOLVED, "listing attributes have no membership semantics"
                )
            )
            continue
        comparator = profile.comparator_for(path, node)
        outcome, reason = _within_one(node, scenario_value, comparator)
        results.append(PathResult(path, outcome, reason))
    within = all(r.outcome is not Outcome.FAIL for r in results)
    return Verdict(within=within, per_path=tuple(results))


# -- containment and diff ----------------------------------------------------


def _check_same_shape(a: ObjectValue, b: ObjectValue, path: str = "") -> None:
    where = path or "<root>"
    if a.class_name != b.class_name or a.module_key != b.module_key:
        raise ShapeMismatchError(
            f"trees disagree at {where}: class {a.class_name} vs {b.class_name}"
        )
    if a.keys() != b.keys():
        raise ShapeMismatchError(f"trees disagree at {where}: different properties")
    for (name, left), (_, right) in zip(a.entries, b.entries):
        child_path = f"{path}.{name}" if path else name
        if isinstance(left, ObjectValue) and isinstance(right, ObjectValue):
            _check_same_shape(left, right, child_path)
        elif type(left) is not type(right):
            raise ShapeMismatchError(
                f"trees disagree at {child_path}: different leaf types"
            )
        elif isinstance(left, EnumValue) and left.alternatives != right.alternatives:
            raise ShapeMismatchError(
                f"trees disagree at {child_path}: different enumerations"
            )


def _contains_one(
    outer: LeafValue, inner: LeafValue, comparator: Comparator
) -> tuple[Outcome, str]:
    if outer == inner:
        return Outcome.PASS, "equal configurations admit the same scenarios"
    kind = comparator.kind
    if kind is ComparatorKind.FLAG_INCLUSION and isinstance(outer, BoolValue):
        if inner.value and not outer.value:
            return Outcome.FAIL, "inner admits a condition outer excludes"
        return Outcome.PASS, "inner flags are a subset of outer flags"
    if kind is ComparatorKind.LEQ and isinstance(outer, FloatValue):
        if outer.value >= inner.value:
            return Outcome.PASS, (
                f"outer bound {format_float(outer.value)} >= "
                f"inner bound {format_float(inner.value)}"
            )
        return Outcome.FAIL, (
            f"outer bound {format_float(outer.value)} < "
            f"inner bound {format_float(inner.value)}"
        )
    if kind is ComparatorKind.GEQ and isinstance(outer, FloatValue):
        if outer.value <= inner.value:
            return Outcome.PASS, (
                f"outer bound {format_float(outer.value)} <= "
                f"inner bound {format_float(inner.value)}"
            )
        return Outcome.FAIL, (
            f"outer bound {format_float(outer.value)} > "
            f"inner bound {format_float(inner.value)}"
        )
    if kind is ComparatorKind.RANGE and isinstance(outer, FloatValue):
        # Same closure means same declared range; check the superset anyway.
        out_low = outer.low if outer.low is not None else float("-inf")
        out_high = outer.high if outer.high is not None else float("inf")
        in_low = inner.low if inner.low is not None else float("-inf")
        in_high = inner.high if inner.high is not None else float("inf")
        if out_low <= in_low and in_high <= out_high:
            return Outcome.PASS, "outer range covers inner range"
        return Outcome.FAIL, "outer range does not cover inner range"
    # EQ and EQ_TOLERANCE demand identical admitted sets, i.e. equal values.
    return Outcome.FAIL, (
        f"exact attribute differs: {format_scalar(leaf_scalar(outer))} vs "
        f"{format_scalar(leaf_scalar(inner))}"
    )


def contains(
    outer: ObjectValue, inner: ObjectValue, profile: AnalysisProfile | None = None
) -> ContainmentReport:
    """Does `outer` admit every scenario `inner` admits?

    Both trees must come from the same template closure.
    """
    profile = profile if profile is not None else standard_profile()
    _check_same_shape(outer, inner)
    results: list[PathResult] = []
    inner_leaves = dict(iter_leaves(inner))
    for path, outer_leaf in iter_leaves(outer):
        if isinstance(outer_leaf, ListingValue):
            continue  # listings carry no membership semantics
        inner_leaf = inner_leaves[path]
        comparator = profile.comparator_for(path, outer_leaf)
        outcome, reason = _contains_one(outer_leaf, inner_leaf, comparator)
        results.append(PathResult(path, outcome, reason))
    verdict = all(r.outcome is not Outcome.FAIL for r in results)
    return ContainmentReport(contains=verdict, per_path=tuple(results))


def diff(a: ObjectValue, b: ObjectValue) -> list[DiffEntry]:
    """Leaf paths whose values differ, in declaration order."""
    _check_same_shape(a, b)
    b_leaves = dict(iter_leaves(b))
    out: list[DiffEntry] = []
    for path, leaf_a in iter_leaves(a):
        leaf_b = b_leaves[path]
        if leaf_a != leaf_b:
            out.append(DiffEntry(path, leaf_scalar(leaf_a), leaf_scalar(leaf_b)))
    return out
