"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them) and enforcing its runtime budget."""

from __future__ import annotations

import copy
import itertools
import json
import re
import time
from contextlib import contextmanager

import yaml
from hypothesis import given, settings

import oddl
from oddl import (
    SchemaEnv,
    ViolationKind,
    amend,
    check_constraints,
    contains,
    render_json,
    render_plantuml,
    render_yaml,
    resolve_path,
    scenario_within,
)
from oddl.assets import read_bundled
from oddl.cli import main
from oddl.values import BoolValue, FloatValue, ListingValue, ObjectValue

import strategies as sts
from support import (
    DALS,
    DIRECTION_PATH,
    FIXTURES,
    LANE_DIMENSION_PATH,
    LANE_TYPE_PREFIX,
    LANE_USAGE_PATH,
    SPEED_PATH,
    eval_instance,
    graph_for,
    instance_source,
)
from test_render import PUBLISHED_FRAGMENT


@contextmanager
def criterion(number: int, description: str, budget: float | None = None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed >= budget:
            raise AssertionError(
                f"criterion {number} took {elapsed:.2f}s, budget {budget:.0f}s"
            )
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL - {description}", flush=True)
        raise
    print(
        f"ACCEPTANCE {number}: PASS - {description} ({elapsed:.2f}s)",
        flush=True,
    )


def _extract_object(document: str, key: str) -> str:
    """The verbatim `{...}` block following `"key":` in a JSON document."""
    anchor = document.index(f'"{key}":')
    start = document.index("{", anchor)
    depth = 0
    for i in range(start, len(document)):
        if document[i] == "{":
            depth += 1
        elif document[i] == "}":
            depth -= 1
            if depth == 0:
                return document[start : i + 1]
    raise AssertionError("unbalanced braces")


def _strip_ws(text: str) -> str:
    return re.sub(r"\s+", "", text)


def test_criterion_1_published_json_reproduction(capsys):
    with criterion(1, "published JSON rendering reproduced byte-exactly", budget=1.0):
        rc = main(["eval", "-f", "json", str(FIXTURES / "ODD1_test.odd")])
        captured = capsys.readouterr()
        assert rc == 0
        assert captured.err == ""
        rendered = _extract_object(captured.out, "drivable_area_lane_specification")
        assert _strip_ws(rendered) == _strip_ws(PUBLISHED_FRAGMENT)
        # Key order and values, independently of the textual comparison.
        pairs = json.loads(rendered, object_pairs_hook=list)
        assert [k for k, _ in pairs] == [
            "lane_dimensions",
            "lane_markings",
            "lane_type",
            "direction_of_travel",
            "speed_limit",
            "lane_usage",
        ]
        data = json.loads(rendered)
        assert data["lane_dimensions"]["lane_dimension"] == 2.8
        assert data["lane_markings"] == {
            "clear_lane_marking": True,
            "blurred_lane_marking": False,
            "no_lane_marking": False,
            "temporary_lane_marking": False,
        }
        assert data["lane_type"] == {
            "bus_lane": False,
            "traffic_lane": True,
            "cyclists_lane": False,
            "tram_lane": False,
            "emergency_lane": False,
            "shared_lane": False,
            "other_special_purpose_lane": False,
        }
        assert data["direction_of_travel"] == "right_hand_travel"
        assert data["speed_limit"] == 15.0
        assert data["lane_usage"] is True


def test_criterion_2_published_diagnostic_reproduction(capsys):
    with criterion(2, "published constraint diagnostic reproduced", budget=1.0):
        rc = main(["eval", str(FIXTURES / "ODD1_31.odd")])
        captured = capsys.readouterr()
        assert rc != 0
        assert captured.out == ""
        err = captured.err
        assert "Type constraint 'isBetween(0, speed_limit_global)' violated." in err
        assert "Value: 31.0" in err
        location = re.search(
            r"at \S+#Drivable_area_lane_specification\.speed_limit "
            r"\(file://\S+scen_template\.odd, line (\d+)\)",
            err,
        )
        assert location is not None
        cited_line = int(location.group(1))
        asset_lines = read_bundled("scen_template.odd").splitlines()
        assert asset_lines[cited_line - 1].strip().startswith("speed_limit :")


def test_criterion_3_defaults_and_required_fields():
    with criterion(3, "defaults apply and required fields are enforced", budget=1.0):
        defaulted = eval_instance(lane_usage=None)
        assert defaulted.ok
        assert resolve_path(defaulted.value, LANE_USAGE_PATH) == BoolValue(True)
        assert '"lane_usage": true' in render_json(defaulted.value)
        missing = eval_instance(direction=None)
        assert not missing.ok
        assert [
            v.kind for v in missing.violations
        ] == [ViolationKind.MISSING_REQUIRED]
        assert missing.violations[0].property_path == DIRECTION_PATH
        # Deterministic: same inputs, same results.
        assert eval_instance(lane_usage=None) == defaulted
        assert eval_instance(direction=None) == missing


def test_criterion_4_override_only_amendments(odd1_tree):
    env = SchemaEnv(graph_for(instance_source()))
    checked = 0

    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(case=sts.illegal_assignments())
    def property_test(case):
        nonlocal checked
        assignments, bad_path = case
        result = amend(odd1_tree, sts.block_from_assignments(assignments), env)
        assert not result.ok, f"undeclared property {bad_path} was accepted"
        unknown = [
            v for v in result.violations if v.kind is ViolationKind.UNKNOWN_PROPERTY
        ]
        assert any(v.property_path == bad_path for v in unknown)
        checked += 1

    with criterion(4, "200 illegal amendments all rejected as UNKNOWN_PROPERTY"):
        property_test()
        assert checked >= 200


def test_criterion_5_immutability_property_suite(odd1_tree):
    env = SchemaEnv(graph_for(instance_source()))
    checked = 0

    @settings(max_examples=500, deadline=None, derandomize=True)
    @given(first=sts.legal_amendments(), pair=sts.disjoint_amendment_pair())
    def property_test(first, pair):
        nonlocal checked
        base = amend(odd1_tree, first, env).value
        snapshot = copy.deepcopy(base)
        left, right = pair
        once = amend(base, left, env).value
        assert base == snapshot, "amend mutated its input tree"
        twice = amend(once, left, env).value
        assert once == twice, "amend is not idempotent"
        ab = amend(once, right, env).value
        ba = amend(amend(base, right, env).value, left, env).value
        assert ab == ba, "disjoint amendments do not commute"
        assert base == snapshot
        checked += 1

    with criterion(
        5, "500 random amendment pairs: immutable, idempotent, commuting", budget=30.0
    ):
        property_test()
        assert checked >= 500


def _containment_family():
    speeds = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    flags = ("bus_lane", "traffic_lane", "cyclists_lane")
    directions = ("right_hand_travel", "left_hand_travel")
    family = []
    for speed, bits, direction in itertools.product(
        speeds, itertools.product((False, True), repeat=3), directions
    ):
        result = eval_instance(
            speed=speed, direction=direction, lane_type=dict(zip(flags, bits))
        )
        assert result.ok, result.violations
        family.append(result.value)
    return family, flags


def _scenario_grid(flags):
    speeds = [i * 2.5 for i in range(13)]  # 0.0 .. 30.0
    directions = ("right_hand_travel", "left_hand_travel")
    grid = []
    for speed, bits, direction in itertools.product(
        speeds, itertools.product((False, True), repeat=3), directions
    ):
        assignments = {SPEED_PATH: speed, DIRECTION_PATH: direction}
        assignments.update(
            {f"{LANE_TYPE_PREFIX}.{flag}": bit for flag, bit in zip(flags, bits)}
        )
        grid.append(oddl.Scenario.from_mapping(assignments))
    return grid


def test_criterion_6_containment_agrees_with_brute_force():
    with criterion(
        6, "containment matches scenario-grid enumeration on all pairs", budget=60.0
    ):
        family, flags = _containment_family()
        grid = _scenario_grid(flags)
        assert len(family) == 112 and len(grid) == 208
        admitted = [
            frozenset(
                j for j, s in enumerate(grid) if scenario_within(tree, s).within
            )
            for tree in family
        ]
        impl = [
            [contains(a, b).contains for b in family] for a in family
        ]
        pairs = mismatches = 0
        for i, j in itertools.product(range(len(family)), repeat=2):
            pairs += 1
            if impl[i][j] != (admitted[j] <= admitted[i]):
                mismatches += 1
        assert pairs == 112 * 112
        assert mismatches == 0, f"{mismatches} of {pairs} pairs disagree"
        # Reflexivity on the same family.
        assert all(impl[i][i] for i in range(len(family)))
        # Transitivity on the same family.
        covered = [
            {j for j in range(len(family)) if impl[i][j]} for i in range(len(family))
        ]
        for i in range(len(family)):
            for j in covered[i]:
                assert covered[j] <= covered[i], f"transitivity broken at {i}->{j}"


def _render_corpus(odd1_tree):
    trees = [
        odd1_tree,
        eval_instance(speed=20.0).value,
        eval_instance(direction="left_hand_travel").value,
        eval_instance(lane_type={"bus_lane": True, "traffic_lane": False}).value,
        ObjectValue("T", "m", ()),
        ObjectValue("T", "m", (("x", BoolValue(True)),)),
        ObjectValue("T", "m", (("v", FloatValue(30.0)),)),
        ObjectValue(
            "T",
            "m",
            (
                (
                    "events",
                    ListingValue(
                        records=(
                            (("name", "event1"), ("type", "failure"), ("probability", 0.6)),
                        )
                    ),
                ),
                ("nested", ObjectValue("U", "m", (("s", oddl.StringValue("true")),))),
            ),
        ),
    ]
    return trees


def test_criterion_7_cross_format_equivalence(odd1_tree):
    with criterion(7, "JSON/YAML/PlantUML renderings agree on every test tree"):
        for tree in _render_corpus(odd1_tree):
            json_text = render_json(tree)
            assert json.loads(json_text) == yaml.safe_load(render_yaml(tree))
            assert render_plantuml(tree) == f"@startjson\n{json_text}\n@endjson"


def test_criterion_8_constraint_inclusivity(odd1_tree):
    env = SchemaEnv(graph_for(instance_source()))
    cases = [
        (LANE_DIMENSION_PATH, 2.7, True),
        (LANE_DIMENSION_PATH, 3.2, True),
        (LANE_DIMENSION_PATH, 2.7 - 1e-9, False),
        (LANE_DIMENSION_PATH, 3.2 + 1e-9, False),
        (SPEED_PATH, 0.0, True),
        (SPEED_PATH, 30.0, True),
        (SPEED_PATH, 0.0 - 1e-9, False),
        (SPEED_PATH, 30.0 + 1e-9, False),
    ]
    with criterion(8, "range bounds are inclusive and compared exactly"):
        for path, value, expected_ok in cases:
            tree = amend(
                odd1_tree, sts.block_from_assignments({path: value}), env
            ).value
            violations = check_constraints(tree, env)
            if expected_ok:
                assert violations == [], (path, value)
            else:
                assert [v.kind for v in violations] == [
                    ViolationKind.CONSTRAINT_VIOLATED
                ], (path, value)
        # The expressible boundary values also pass end to end.
        assert eval_instance(speed=0.0).ok
        assert eval_instance(speed=30.0).ok
        assert eval_instance(lane_dimension=2.7).ok
        assert eval_instance(lane_dimension=3.2).ok


def test_criterion_9_bundled_assets_self_validate():
    with criterion(9, "bundled templates parse, resolve, and self-validate", budget=1.0):
        names = oddl.list_standard_templates()
        assert names == [
            "odd_template",
            "scen_template",
            "env_template",
            "dyn_template",
        ]
        from oddl.evaluator import ClassType, _build_default_object, _EvalContext
        from oddl.syntax import EMPTY_AMENDMENT
        from test_assets import _all_defaulted_classes

        validated = 0
        for name in names:
            graph = oddl.load_standard_graph(name)  # parses + import-resolves
            env = SchemaEnv(graph)
            assert not env.const_violations
            for module_key, cls in _all_defaulted_classes(graph, env):
                ctx = _EvalContext(env=env)
                tree = _build_default_object(ctx, ClassType(module_key, cls), "", ())
                assert not ctx.violations
                result = amend(tree, EMPTY_AMENDMENT, env)
                assert result.ok
                assert check_constraints(result.value, env) == []
                validated += 1
        assert validated >= 6
