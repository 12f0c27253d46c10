"""Instance evaluation: defaults, amendment by override, constraint checks.

Evaluation builds a fully defaulted tree for the instance's target class,
applies the amendment block (overriding existing properties only, never
creating new ones), then reports every violation it can find in one pass:
version gates, unknown properties, type mismatches, missing required
values, range-constraint breaches, and listing probability ranges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Union

from .diagnostics import EvalResult, Violation, ViolationKind
from .imports import ModuleGraph
from .source import EvaluationError, SourceSpan
from .syntax import (
    AmendmentBlock,
    ClassDecl,
    ConstraintExpr,
    ConstRef,
    Literal,
    ModuleAst,
    PropertyDecl,
    TypeAliasDecl,
    TypeRef,
)
from .values import (
    BoolValue,
    EnumValue,
    FloatValue,
    ListingValue,
    ObjectValue,
    StringValue,
    Value,
    format_float,
    format_scalar,
    join_path,
)

TOOL_VERSION = "0.26.0"

_BUILTIN_TYPES = {"Float": "float", "Boolean": "boolean", "String": "string", "Listing": "listing"}

_SEMVER_RE = re.compile(r"^(\d+)\.(\d+)\.(\d+)$")


def parse_version(text: str) -> tuple[int, int, int] | None:
    match = _SEMVER_RE.match(text)
    if match is None:
        return None
    return tuple(int(g) for g in match.groups())  # type: ignore[return-value]


def check_version_gate(
    declared: str | None,
    tool_version: str,
    *,
    decl_site: SourceSpan | None = None,
    module_name: str = "",
    module_key: str = "",
) -> Violation | None:
    """Violation iff the module demands a newer toolchain than `tool_version`."""
    if declared is None:
        return None
    tool = parse_version(tool_version)
    if tool is None:
        raise ValueError(f"malformed tool version {tool_version!r}")
    wanted = parse_version(declared)
    if wanted is None:
        return Violation(
            kind=ViolationKind.TYPE_MISMATCH,
            message=f"malformed minToolVersion {declared!r} (expected MAJOR.MINOR.PATCH)",
            offending_value=declared,
            decl_site=decl_site,
            module_name=module_name,
            decl_module_key=module_key,
        )
    if wanted > tool:
        return Violation(
            kind=ViolationKind.VERSION_GATE,
            message=(
                f"module requires tool version >= {declared}, "
                f"but this toolchain is {tool_version}"
            ),
            offending_value=declared,
            decl_site=decl_site,
            module_name=module_name,
            decl_module_key=module_key,
        )
    return None


# -- schema environment ------------------------------------------------------


@dataclass(frozen=True)
class ClassType:
    module_key: str
    decl: ClassDecl


@dataclass(frozen=True)
class AliasType:
    decl: TypeAliasDecl


ResolvedType = Union[str, ClassType, AliasType]  # str is a builtin tag


@dataclass(frozen=True)
class MissingValue:
    """Placeholder for a defaultless property the amendment must supply."""

    property_name: str


class SchemaEnv:
    """Name resolution over a module graph: classes, aliases, and the merged
    constant environment. Constants must be globally unique."""

    def __init__(self, graph: ModuleGraph):
        self.graph = graph
        self.const_violations: list[Violation] = []
        self._consts: dict[str, Literal] = {}
        self._imports_of: dict[str, frozenset[str]] = {}
        for key, module in graph.modules.items():
            self._imports_of[key] = frozenset(
                _import_key(imp) for imp in module.imports
            )
            for const in module.consts:
                if const.name in self._consts:
                    self.const_violations.append(
                        Violation(
                            kind=ViolationKind.TYPE_MISMATCH,
                            message=(
                                f"constant '{const.name}' is declared in more than "
                                "one module; constants may not shadow each other"
                            ),
                            property_path=const.name,
                            offending_value=format_scalar(const.value),
                            decl_site=const.span,
                            module_name=module.module_name or key,
                            decl_module_key=key,
                        )
                    )
                else:
                    self._consts[const.name] = const.value
        self._bounds_cache: dict[tuple[str, str, str], tuple] = {}

    def module(self, key: str) -> ModuleAst:
        return self.graph.modules[key]

    def const(self, name: str) -> Literal | None:
        return self._consts.get(name)

    def class_decl(self, module_key: str, name: str) -> ClassDecl | None:
        module = self.graph.modules.get(module_key)
        return module.find_class(name) if module else None

    def resolve_typeref(self, ref: TypeRef, from_key: str) -> ResolvedType | None:
        name = ref.name
        if "." not in name:
            builtin = _BUILTIN_TYPES.get(name)
            if builtin is not None:
                return builtin
            module = self.graph.modules.get(from_key)
            if module is None:
                return None
            cls = module.find_class(name)
            if cls is not None:
                return ClassType(from_key, cls)
            alias = module.find_alias(name)
            if alias is not None:
                return AliasType(alias)
            return None
        module_key, _, rest = name.partition(".")
        if "." in rest:
            return None
        visible = self._imports_of.get(from_key, frozenset())
        if module_key != from_key and module_key not in visible:
            return None
        module = self.graph.modules.get(module_key)
        if module is None:
            return None
        cls = module.find_class(rest)
        if cls is not None:
            return ClassType(module_key, cls)
        alias = module.find_alias(rest)
        if alias is not None:
            return AliasType(alias)
        return None

    def resolve_bounds(
        self, prop: PropertyDecl, module_key: str, class_name: str
    ) -> tuple[float | None, float | None, tuple[Violation, ...]]:
        """Resolved (low, high) of a Float constraint, with any violations."""
        constraint = prop.constraint
        if constraint is None:
            return None, None, ()
        cache_key = (module_key, class_name, prop.name)
        if cache_key in self._bounds_cache:
            return self._bounds_cache[cache_key]
        module = self.graph.modules.get(module_key)
        module_name = (module.module_name if module else "") or module_key
        violations: list[Violation] = []

        def resolve_arg(arg: float | ConstRef) -> float | None:
            if isinstance(arg, ConstRef):
                value = self.const(arg.name)
                if not isinstance(value, float) or isinstance(value, bool):
                    violations.append(
                        Violation(
                            kind=ViolationKind.TYPE_MISMATCH,
                            message=(
                                f"constraint '{constraint.source_text}' references "
                                f"'{arg.name}', which is not a numeric constant"
                            ),
                            property_path=prop.name,
                            constraint_text=constraint.source_text,
                            offending_value=arg.name,
                            decl_site=prop.span,
                            module_name=module_name,
                            class_name=class_name,
                            property_name=prop.name,
                            decl_module_key=module_key,
                        )
                    )
                    return None
                return value
            return arg

        low = resolve_arg(constraint.low)
        high = resolve_arg(constraint.high)
        if low is not None and high is not None and low > high:
            violations.append(
                Violation(
                    kind=ViolationKind.TYPE_MISMATCH,
                    message=(
                        f"constraint '{constraint.source_text}' is empty after "
                        f"constant resolution ({format_float(low)} > {format_float(high)})"
                    ),
                    property_path=prop.name,
                    constraint_text=constraint.source_text,
                    offending_value=format_float(low),
                    decl_site=prop.span,
                    module_name=module_name,
                    class_name=class_name,
                    property_name=prop.name,
                    decl_module_key=module_key,
                )
            )
            low = high = None
        result = (low, high, tuple(violations))
        self._bounds_cache[cache_key] = result
        return result


def _import_key(import_string: str) -> str:
    from .imports import _module_key

    return _module_key(import_string)


# -- evaluation --------------------------------------------------------------


@dataclass
class _EvalContext:
    env: SchemaEnv
    violations: list[Violation] = field(default_factory=list)
    # Paths whose required-value scan is suppressed because the defect was
    # already reported (unresolved type, bad default).
    suppressed: set[str] = field(default_factory=set)
    # Amended leaf paths -> amendment span, for use-site attribution.
    touched: dict[str, SourceSpan] = field(default_factory=dict)


def _decl_context(ctx: _EvalContext, module_key: str) -> str:
    module = ctx.env.graph.modules.get(module_key)
    return (module.module_name if module else "") or module_key


def _violation(
    ctx: _EvalContext,
    kind: ViolationKind,
    message: str,
    *,
    path: str,
    prop: PropertyDecl | None = None,
    module_key: str = "",
    class_name: str = "",
    offending: str | None = None,
    constraint: ConstraintExpr | None = None,
    use_site: SourceSpan | None = None,
    decl_site: SourceSpan | None = None,
) -> None:
    ctx.violations.append(
        Violation(
            kind=kind,
            message=message,
            property_path=path,
            offending_value=offending,
            constraint_text=constraint.source_text if constraint else None,
            decl_site=prop.span if prop is not None else decl_site,
            use_site=use_site,
            module_name=_decl_context(ctx, module_key) if module_key else "",
            class_name=class_name,
            property_name=prop.name if prop is not None else "",
            constraint_span=constraint.span if constraint else None,
            decl_module_key=module_key,
        )
    )


def _make_leaf(
    ctx: _EvalContext,
    prop: PropertyDecl,
    resolved: ResolvedType,
    raw: Union[Literal, ConstRef, ListingValue],
    path: str,
    module_key: str,
    class_name: str,
    use_site: SourceSpan | None,
) -> Value | None:
    """Typed leaf for `raw` against the property's declared type, or None
    (with a violation recorded) when they disagree."""
    value: Union[Literal, ListingValue]
    if isinstance(raw, ConstRef):
        const = ctx.env.const(raw.name)
        if const is None:
            _violation(
                ctx,
                ViolationKind.TYPE_MISMATCH,
                f"unresolved constant reference '{raw.name}'",
                path=path,
                prop=prop,
                module_key=module_key,
                class_name=class_name,
                offending=raw.name,
                use_site=use_site,
            )
            return None
        value = const
    else:
        value = raw

    def mismatch(expected: str) -> None:
        _violation(
            ctx,
            ViolationKind.TYPE_MISMATCH,
            f"property '{prop.name}' expects {expected}, "
            f"got {_describe_value(value)}",
            path=path,
            prop=prop,
            module_key=module_key,
            class_name=class_name,
            offending=_format_raw(value),
            use_site=use_site,
        )

    if isinstance(resolved, ClassType):
        mismatch(f"an object of class {resolved.decl.name}")
        return None
    if isinstance(resolved, AliasType):
        if not isinstance(value, str):
            mismatch(f"one of {_alts(resolved.decl)}")
            return None
        if value not in resolved.decl.alternatives:
            _violation(
                ctx,
                ViolationKind.ENUM_OUT_OF_RANGE,
                f"'{value}' is not one of {_alts(resolved.decl)}",
                path=path,
                prop=prop,
                module_key=module_key,
                class_name=class_name,
                offending=f'"{value}"',
                use_site=use_site,
            )
            return None
        return EnumValue(
            value=value,
            alias=resolved.decl.name,
            alternatives=resolved.decl.alternatives,
        )
    if resolved == "float":
        if isinstance(value, bool) or not isinstance(value, float):
            mismatch("a Float")
            return None
        # Bound-resolution problems are check_constraints' to report.
        low, high, _ = ctx.env.resolve_bounds(prop, module_key, class_name)
        return FloatValue(value=value, low=low, high=high)
    if resolved == "boolean":
        if not isinstance(value, bool):
            mismatch("a Boolean")
            return None
        return BoolValue(value=value)
    if resolved == "string":
        if not isinstance(value, str):
            mismatch("a String")
            return None
        return StringValue(value=value)
    if resolved == "listing":
        if isinstance(value, ListingValue):
            return value
        mismatch("a Listing")
        return None
    raise AssertionError(f"unhandled resolved type {resolved!r}")


def _alts(alias: TypeAliasDecl) -> str:
    return ", ".join(f'"{a}"' for a in alias.alternatives)


def _describe_value(value: object) -> str:
    if isinstance(value, bool):
        return f"the Boolean {format_scalar(value)}"
    if isinstance(value, float):
        return f"the Float {format_float(value)}"
    if isinstance(value, str):
        return f'the String "{value}"'
    if isinstance(value, ListingValue):
        return "a Listing"
    return repr(value)


def _format_raw(value: object) -> str:
    if isinstance(value, (bool, float, str)):
        return format_scalar(value)
    return repr(value)


def _build_default_object(
    ctx: _EvalContext, ctype: ClassType, path: str, stack: tuple[tuple[str, str], ...]
) -> ObjectValue:
    key = (ctype.module_key, ctype.decl.name)
    if key in stack:
        chain = " -> ".join(name for _, name in (*stack, key))
        raise EvaluationError(f"recursive class nesting: {chain}")
    entries: list[tuple[str, Value]] = []
    for prop in ctype.decl.properties:
        prop_path = join_path(path, prop.name)
        resolved = ctx.env.resolve_typeref(prop.declared_type, ctype.module_key)
        if resolved is None:
            _violation(
                ctx,
                ViolationKind.TYPE_MISMATCH,
                f"unresolved type '{prop.declared_type.name}' "
                f"for property '{prop.name}'",
                path=prop_path,
                prop=prop,
                module_key=ctype.module_key,
                class_name=ctype.decl.name,
                offending=prop.declared_type.name,
            )
            ctx.suppressed.add(prop_path)
            entries.append((prop.name, MissingValue(prop.name)))
            continue
        if isinstance(resolved, ClassType):
            entries.append(
                (prop.name, _build_default_object(ctx, resolved, prop_path, (*stack, key)))
            )
            continue
        if prop.default is not None:
            leaf = _make_leaf(
                ctx, prop, resolved, prop.default, prop_path,
                ctype.module_key, ctype.decl.name, use_site=None,
            )
            if leaf is None:
                ctx.suppressed.add(prop_path)
                entries.append((prop.name, MissingValue(prop.name)))
            else:
                entries.append((prop.name, leaf))
        elif resolved == "listing":
            entries.append((prop.name, ListingValue()))
        else:
            entries.append((prop.name, MissingValue(prop.name)))
    return ObjectValue(
        class_name=ctype.decl.name,
        module_key=ctype.module_key,
        entries=tuple(entries),
    )


def _amend_object(
    ctx: _EvalContext, base: ObjectValue, block: AmendmentBlock, path: str
) -> ObjectValue:
    cls = ctx.env.class_decl(base.module_key, base.class_name)
    if cls is None:
        raise EvaluationError(
            f"value tree references unknown class "
            f"'{base.module_key}.{base.class_name}'"
        )
    result = base
    for entry in block.entries:
        prop = cls.find_property(entry.name)
        entry_path = join_path(path, entry.name)
        if prop is None:
            _violation(
                ctx,
                ViolationKind.UNKNOWN_PROPERTY,
                f"class {cls.name} has no property '{entry.name}'; amendment "
                "may only override existing properties",
                path=entry_path,
                module_key=base.module_key,
                class_name=cls.name,
                decl_site=cls.span,
                use_site=entry.span,
            )
            continue
        resolved = ctx.env.resolve_typeref(prop.declared_type, base.module_key)
        if resolved is None:
            # Already reported while building defaults.
            continue
        current = result.get(entry.name)
        if isinstance(entry.value, AmendmentBlock):
            if isinstance(resolved, ClassType) and isinstance(current, ObjectValue):
                amended = _amend_object(ctx, current, entry.value, entry_path)
                result = result.replace_entry(entry.name, amended)
            else:
                _violation(
                    ctx,
                    ViolationKind.TYPE_MISMATCH,
                    f"property '{entry.name}' is not an object; "
                    "a nested amendment block cannot apply",
                    path=entry_path,
                    prop=prop,
                    module_key=base.module_key,
                    class_name=cls.name,
                    use_site=entry.span,
                )
            continue
        leaf = _make_leaf(
            ctx, prop, resolved, entry.value, entry_path,
            base.module_key, cls.name, use_site=entry.span,
        )
        if leaf is not None:
            result = result.replace_entry(entry.name, leaf)
            ctx.touched[entry_path] = entry.span
        else:
            ctx.suppressed.add(entry_path)
    return result


def _scan_missing(ctx: _EvalContext, tree: ObjectValue, path: str) -> None:
    cls = ctx.env.class_decl(tree.module_key, tree.class_name)
    for name, value in tree.entries:
        prop_path = join_path(path, name)
        if isinstance(value, ObjectValue):
            _scan_missing(ctx, value, prop_path)
        elif isinstance(value, MissingValue) and prop_path not in ctx.suppressed:
            prop = cls.find_property(name) if cls else None
            _violation(
                ctx,
                ViolationKind.MISSING_REQUIRED,
                f"property '{name}' has no default value and must be configured",
                path=prop_path,
                prop=prop,
                module_key=tree.module_key,
                class_name=tree.class_name,
            )


def check_constraints(
    tree: ObjectValue, env: SchemaEnv, path: str = ""
) -> list[Violation]:
    """All range and probability violations in `tree`, in declaration order."""
    ctx = _EvalContext(env=env)
    _check_constraints(ctx, tree, path)
    return ctx.violations


def _check_constraints(ctx: _EvalContext, tree: ObjectValue, path: str) -> None:
    cls = ctx.env.class_decl(tree.module_key, tree.class_name)
    for name, value in tree.entries:
        prop_path = join_path(path, name)
        prop = cls.find_property(name) if cls else None
        if isinstance(value, ObjectValue):
            _check_constraints(ctx, value, prop_path)
        elif isinstance(value, FloatValue) and prop is not None and prop.constraint:
            low, high, bound_violations = ctx.env.resolve_bounds(
                prop, tree.module_key, tree.class_name
            )
            ctx.violations.extend(bound_violations)
            if low is not None and high is not None:
                if not (low <= value.value <= high):
                    _violation(
                        ctx,
                        ViolationKind.CONSTRAINT_VIOLATED,
                        f"Type constraint '{prop.constraint.source_text}' violated.",
                        path=prop_path,
                        prop=prop,
                        module_key=tree.module_key,
                        class_name=tree.class_name,
                        offending=format_float(value.value),
                        constraint=prop.constraint,
                    )
        elif isinstance(value, ListingValue):
            for i, record in enumerate(value.records):
                for field_name, field_value in record:
                    if field_name != "probability":
                        continue
                    if isinstance(field_value, bool) or not isinstance(
                        field_value, (int, float)
                    ):
                        _violation(
                            ctx,
                            ViolationKind.TYPE_MISMATCH,
                            "listing field 'probability' must be numeric",
                            path=f"{prop_path}[{i}].probability",
                            prop=prop,
                            module_key=tree.module_key,
                            class_name=tree.class_name,
                            offending=_format_raw(field_value),
                        )
                    elif not (0.0 <= float(field_value) <= 1.0):
                        _violation(
                            ctx,
                            ViolationKind.PROBABILITY_RANGE,
                            f"probability {format_float(float(field_value))} "
                            "is outside [0.0, 1.0]",
                            path=f"{prop_path}[{i}].probability",
                            prop=prop,
                            module_key=tree.module_key,
                            class_name=tree.class_name,
                            offending=format_float(float(field_value)),
                        )


def amend(base: ObjectValue, amendment: AmendmentBlock, env: SchemaEnv) -> EvalResult:
    """Apply an amendment block to an evaluated tree.

    Returns a new tree sharing all untouched subtrees with `base`; `base`
    itself is never modified. Unknown properties and type mismatches come
    back as violations.
    """
    ctx = _EvalContext(env=env)
    tree = _amend_object(ctx, base, amendment, "")
    if ctx.violations:
        return EvalResult.failure(tuple(ctx.violations))
    return EvalResult.success(tree)


def _attach_use_sites(ctx: _EvalContext, violations: list[Violation]) -> list[Violation]:
    out = []
    for violation in violations:
        span = ctx.touched.get(violation.property_path)
        if span is not None and violation.use_site is None:
            violation = replace(violation, use_site=span)
        out.append(violation)
    return out


def evaluate(
    graph: ModuleGraph, instance_name: str, tool_version: str = TOOL_VERSION
) -> EvalResult:
    """Evaluate an instance declared in the graph's entry module.

    On success every property holds either its default or the amendment's
    override, all constraints hold, and all version gates pass. On failure
    the result carries every violation found, not just the first.
    """
    entry = graph.entry_module()
    instance = entry.find_instance(instance_name)
    if instance is None:
        raise EvaluationError(
            f"no instance named '{instance_name}' in module "
            f"'{entry.module_name or graph.entry}'"
        )
    ctx = _EvalContext(env=SchemaEnv(graph))
    for key, module in graph.modules.items():
        gate = check_version_gate(
            module.min_tool_version,
            tool_version,
            module_name=module.module_name or key,
            module_key=key,
        )
        if gate is not None:
            ctx.violations.append(gate)
    ctx.violations.extend(ctx.env.const_violations)

    target = ctx.env.resolve_typeref(
        TypeRef(name=instance.target_type, span=instance.span), graph.entry
    )
    if not isinstance(target, ClassType):
        _violation(
            ctx,
            ViolationKind.TYPE_MISMATCH,
            f"instance '{instance.name}' targets '{instance.target_type}', "
            "which is not a known class",
            path=instance.name,
            module_key=graph.entry,
            decl_site=instance.span,
            offending=instance.target_type,
        )
        return EvalResult.failure(tuple(ctx.violations))

    base = _build_default_object(ctx, target, "", ())
    tree = _amend_object(ctx, base, instance.amendment, "")
    _scan_missing(ctx, tree, "")
    constraint_violations = check_constraints(tree, ctx.env)
    ctx.violations.extend(_attach_use_sites(ctx, constraint_violations))
    if ctx.violations:
        return EvalResult.failure(tuple(ctx.violations))
    return EvalResult.success(tree)
