"""Command-line front end.

    oddl eval [-f json|yaml|plantuml] [-i NAME] FILE
    oddl within [-p PROFILE] ODD_FILE SCENARIO_FILE
    oddl contains [-p PROFILE] OUTER_FILE INNER_FILE
    oddl diff A_FILE B_FILE
    oddl templates

Exit codes: 0 success, 1 evaluation/constraint (or analysis) failure,
2 parse/import/usage error. Rendered output and analysis reports go to
stdout; diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from enum import IntEnum
from pathlib import Path

from . import assets
from .analysis import (
    Scenario,
    contains,
    diff,
    load_profile,
    load_scenario,
    scenario_within,
    standard_profile,
)
from .diagnostics import EvalResult, render_violation
from .evaluator import TOOL_VERSION, evaluate, parse_version
from .imports import ImportPolicy, ModuleGraph, load_module_graph
from .render import RenderFormat, RenderOptions, render
from .source import (
    EvaluationError,
    OddlError,
    ProfileError,
    RenderError,
    ScenarioError,
    ShapeMismatchError,
    SourceError,
)

IMPORT_ROOTS_VAR = "ODDL_IMPORT_ROOTS"


class ExitStatus(IntEnum):
    OK = 0
    VIOLATION = 1
    ERROR = 2


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _policy_for(path: Path) -> ImportPolicy:
    extra = tuple(
        Path(p)
        for p in os.environ.get(IMPORT_ROOTS_VAR, "").split(os.pathsep)
        if p
    )
    return ImportPolicy.for_file(path, extra_roots=extra)


def _load_graph(file_arg: str) -> ModuleGraph | None:
    path = Path(file_arg)
    try:
        return load_module_graph(path, policy=_policy_for(path))
    except OSError as exc:
        _err(f"error: cannot read {file_arg}: {exc}")
    except SourceError as exc:
        _err(f"error: {exc}")
    return None


def _select_instance(graph: ModuleGraph, requested: str | None) -> str | None:
    entry = graph.entry_module()
    names = [inst.name for inst in entry.instances]
    if requested is not None:
        if requested in names:
            return requested
        _err(f"error: no instance named '{requested}' (declared: {', '.join(names) or 'none'})")
        return None
    if len(names) == 1:
        return names[0]
    if not names:
        _err("error: the file declares no instances")
    else:
        _err(
            "error: the file declares multiple instances "
            f"({', '.join(names)}); pick one with -i"
        )
    return None


def _tool_version(args: argparse.Namespace) -> str | None:
    version = getattr(args, "tool_version", None) or TOOL_VERSION
    if parse_version(version) is None:
        _err(f"error: malformed --tool-version {version!r} (expected MAJOR.MINOR.PATCH)")
        return None
    return version


def _evaluate_file(
    args: argparse.Namespace, file_arg: str, instance: str | None
) -> tuple[ModuleGraph, EvalResult] | None:
    graph = _load_graph(file_arg)
    if graph is None:
        return None
    name = _select_instance(graph, instance)
    if name is None:
        return None
    version = _tool_version(args)
    if version is None:
        return None
    try:
        return graph, evaluate(graph, name, tool_version=version)
    except EvaluationError as exc:
        _err(f"error: {exc}")
        return None


def _print_violations(graph: ModuleGraph, result: EvalResult) -> None:
    blocks = [render_violation(v, graph) for v in result.violations]
    _err("\n\n".join(blocks))


def cmd_eval(args: argparse.Namespace) -> ExitStatus:
    loaded = _evaluate_file(args, args.file, args.instance)
    if loaded is None:
        return ExitStatus.ERROR
    graph, result = loaded
    if not result.ok:
        _print_violations(graph, result)
        return ExitStatus.VIOLATION
    try:
        opts = RenderOptions(format=RenderFormat(args.format), indent_width=args.indent)
        text = render(result.value, opts)
    except (RenderError, ValueError) as exc:
        _err(f"error: {exc}")
        return ExitStatus.ERROR
    print(text)
    return ExitStatus.OK


def _load_profile_arg(args: argparse.Namespace):
    if args.profile is None:
        return standard_profile()
    return load_profile(Path(args.profile))


def cmd_within(args: argparse.Namespace) -> ExitStatus:
    loaded = _evaluate_file(args, args.odd_file, args.instance)
    if loaded is None:
        return ExitStatus.ERROR
    graph, result = loaded
    if not result.ok:
        _err("error: the domain file does not evaluate cleanly:")
        _print_violations(graph, result)
        return ExitStatus.ERROR
    try:
        scenario = load_scenario(Path(args.scenario_file))
        profile = _load_profile_arg(args)
        verdict = scenario_within(result.value, scenario, profile)
    except OSError as exc:
        _err(f"error: {exc}")
        return ExitStatus.ERROR
    except (ScenarioError, ProfileError) as exc:
        _err(f"error: {exc}")
        return ExitStatus.ERROR
    print(json.dumps(verdict.to_json_dict(), indent=2))
    return ExitStatus.OK if verdict.within else ExitStatus.VIOLATION


def cmd_contains(args: argparse.Namespace) -> ExitStatus:
    outer_loaded = _evaluate_file(args, args.outer_file, None)
    if outer_loaded is None:
        return ExitStatus.ERROR
    outer_graph, outer_result = outer_loaded
    if not outer_result.ok:
        _err("error: the outer domain does not evaluate cleanly:")
        _print_violations(outer_graph, outer_result)
        return ExitStatus.ERROR
    inner_loaded = _evaluate_file(args, args.inner_file, None)
    if inner_loaded is None:
        return ExitStatus.ERROR
    inner_graph, inner_result = inner_loaded
    if not inner_result.ok:
        _err("error: the inner domain does not evaluate cleanly:")
        _print_violations(inner_graph, inner_result)
        return ExitStatus.ERROR
    try:
        profile = _load_profile_arg(args)
        report = contains(outer_result.value, inner_result.value, profile)
    except OSError as exc:
        _err(f"error: {exc}")
        return ExitStatus.ERROR
    except (ShapeMismatchError, ProfileError) as exc:
        _err(f"error: {exc}")
        return ExitStatus.ERROR
    print(json.dumps(report.to_json_dict(), indent=2))
    return ExitStatus.OK if report.contains else ExitStatus.VIOLATION


def cmd_diff(args: argparse.Namespace) -> ExitStatus:
    a_loaded = _evaluate_file(args, args.a_file, None)
    if a_loaded is None:
        return ExitStatus.ERROR
    a_graph, a_result = a_loaded
    if not a_result.ok:
        _err("error: the first domain does not evaluate cleanly:")
        _print_violations(a_graph, a_result)
        return ExitStatus.ERROR
    b_loaded = _evaluate_file(args, args.b_file, None)
    if b_loaded is None:
        return ExitStatus.ERROR
    b_graph, b_result = b_loaded
    if not b_result.ok:
        _err("error: the second domain does not evaluate cleanly:")
        _print_violations(b_graph, b_result)
        return ExitStatus.ERROR
    try:
        entries = diff(a_result.value, b_result.value)
    except ShapeMismatchError as exc:
        _err(f"error: {exc}")
        return ExitStatus.ERROR
    payload = [{"path": e.path, "a": e.a, "b": e.b} for e in entries]
    print(json.dumps(payload, indent=2))
    return ExitStatus.OK if not entries else ExitStatus.VIOLATION


def cmd_templates(args: argparse.Namespace) -> ExitStatus:
    for name in assets.list_standard_templates():
        print(name)
    return ExitStatus.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oddl",
        description="Evaluate, render, and analyze Operational Design Domain files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_instance: bool = False) -> None:
        p.add_argument(
            "--tool-version",
            metavar="X.Y.Z",
            help="pretend to be this toolchain version for version gates",
        )
        if with_instance:
            p.add_argument("-i", "--instance", help="instance to evaluate")

    p_eval = sub.add_parser("eval", help="evaluate an instance and render it")
    p_eval.add_argument("file")
    p_eval.add_argument(
        "-f",
        "--format",
        choices=[f.value for f in RenderFormat],
        default="json",
    )
    p_eval.add_argument("--indent", type=int, default=2, metavar="N")
    add_common(p_eval, with_instance=True)
    p_eval.set_defaults(func=cmd_eval)

    p_within = sub.add_parser("within", help="check a scenario against a domain")
    p_within.add_argument("odd_file")
    p_within.add_argument("scenario_file")
    p_within.add_argument("-p", "--profile", help="analysis profile JSON file")
    add_common(p_within, with_instance=True)
    p_within.set_defaults(func=cmd_within)

    p_contains = sub.add_parser(
        "contains", help="check that one domain covers another"
    )
    p_contains.add_argument("outer_file")
    p_contains.add_argument("inner_file")
    p_contains.add_argument("-p", "--profile", help="analysis profile JSON file")
    add_common(p_contains)
    p_contains.set_defaults(func=cmd_contains)

    p_diff = sub.add_parser("diff", help="attribute-level diff of two domains")
    p_diff.add_argument("a_file")
    p_diff.add_argument("b_file")
    add_common(p_diff)
    p_diff.set_defaults(func=cmd_diff)

    p_templates = sub.add_parser("templates", help="list bundled templates")
    p_templates.set_defaults(func=cmd_templates)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep that contract.
        return int(exc.code or 0)
    try:
        return int(args.func(args))
    except OddlError as exc:
        _err(f"error: {exc}")
        return int(ExitStatus.ERROR)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
