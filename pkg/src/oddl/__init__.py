"""oddl: a typed template language and toolchain for Operational Design Domains.

Workflow: parse `.odd` modules, resolve imports under a security policy,
evaluate an instance into an immutable constraint-checked tree, render it
(JSON / YAML / PlantUML), and analyze it (scenario membership, domain
containment, diff).
"""

from .analysis import (
    AnalysisProfile,
    Comparator,
    ComparatorKind,
    ContainmentReport,
    DiffEntry,
    Outcome,
    Scenario,
    Verdict,
    contains,
    diff,
    eq_tolerance,
    load_profile,
    load_scenario,
    scenario_within,
    standard_profile,
)
from .assets import (
    TemplateAsset,
    get_asset,
    list_standard_templates,
    load_standard_graph,
    load_standard_template,
)
from .diagnostics import EvalResult, Violation, ViolationKind, render_violation
from .evaluator import (
    TOOL_VERSION,
    SchemaEnv,
    amend,
    check_constraints,
    check_version_gate,
    evaluate,
)
from .imports import ImportPolicy, ModuleGraph, load_module_graph, resolve_imports
from .lexer import Token, TokenKind, tokenize
from .parser import parse_module, parse_source
from .render import (
    RenderFormat,
    RenderOptions,
    render,
    render_json,
    render_plantuml,
    render_yaml,
)
from .source import (
    AssetIntegrityError,
    EvaluationError,
    ImportCycleError,
    ImportNotFoundError,
    ImportPolicyError,
    LexError,
    OddlError,
    ParseError,
    ProfileError,
    RenderError,
    ScenarioError,
    ShapeMismatchError,
    SourceSpan,
    UnknownTemplateError,
)
from .syntax import (
    AmendmentBlock,
    AmendmentEntry,
    ClassDecl,
    ConstDecl,
    ConstraintExpr,
    ConstRef,
    InstanceDecl,
    ModuleAst,
    PropertyDecl,
    TypeAliasDecl,
    TypeRef,
    render_source,
    structurally_equal,
)
from .values import (
    BoolValue,
    EnumValue,
    FloatValue,
    ListingValue,
    ObjectValue,
    StringValue,
    format_float,
    iter_leaves,
    leaf_paths,
    resolve_path,
)

__version__ = TOOL_VERSION

__all__ = [
    "AmendmentBlock",
    "AmendmentEntry",
    "AnalysisProfile",
    "AssetIntegrityError",
    "BoolValue",
    "ClassDecl",
    "Comparator",
    "ComparatorKind",
    "ConstDecl",
    "ConstRef",
    "ConstraintExpr",
    "ContainmentReport",
    "DiffEntry",
    "EnumValue",
    "EvalResult",
    "EvaluationError",
    "FloatValue",
    "ImportCycleError",
    "ImportNotFoundError",
    "ImportPolicy",
    "ImportPolicyError",
    "InstanceDecl",
    "LexError",
    "ListingValue",
    "ModuleAst",
    "ModuleGraph",
    "ObjectValue",
    "OddlError",
    "Outcome",
    "ParseError",
    "ProfileError",
    "PropertyDecl",
    "RenderError",
    "RenderFormat",
    "RenderOptions",
    "Scenario",
    "ScenarioError",
    "SchemaEnv",
    "ShapeMismatchError",
    "SourceSpan",
    "StringValue",
    "TemplateAsset",
    "Token",
    "TokenKind",
    "TOOL_VERSION",
    "TypeAliasDecl",
    "TypeRef",
    "UnknownTemplateError",
    "Verdict",
    "Violation",
    "ViolationKind",
    "amend",
    "check_constraints",
    "check_version_gate",
    "contains",
    "diff",
    "eq_tolerance",
    "evaluate",
    "format_float",
    "get_asset",
    "iter_leaves",
    "leaf_paths",
    "list_standard_templates",
    "load_module_graph",
    "load_profile",
    "load_scenario",
    "load_standard_graph",
    "load_standard_template",
    "parse_module",
    "parse_source",
    "render",
    "render_json",
    "render_plantuml",
    "render_source",
    "render_violation",
    "render_yaml",
    "resolve_imports",
    "resolve_path",
    "scenario_within",
    "standard_profile",
    "structurally_equal",
    "tokenize",
]
