from __future__ import annotations

import pytest

from oddl import (
    AmendmentBlock,
    ConstRef,
    ParseError,
    parse_module,
    parse_source,
    render_source,
    structurally_equal,
    tokenize,
)

# Verbatim published excerpt defining the drivable area (note the
# line-wrapped constraint and both comment styles).
DRIVABLE_AREA_EXCERPT = """\
# Note: Excerpt from the file scen_template.pkl

const speed_limit_global = 30.0

typealias Direction_of_travel = "right_hand_travel"
| "left_hand_travel"

class Lane_dimensions {
  // Define properties related to lane dimensions
  lane_dimension : Float (isBetween(2.7, 3.2)) = 2.7
  // meters
}

class Drivable_area_lane_specification {
  lane_dimensions: Lane_dimensions
  lane_markings: Lane_markings
  lane_type: Lane_type
  direction_of_travel: Direction_of_travel
  speed_limit : Float (isBetween(0,
  speed_limit_global))
  lane_usage : Boolean = true

}
"""

# Verbatim published excerpt instantiating the top-level template.
INSTANCE_EXCERPT = """\
# Note: From the file ODD1_test.pkl importing
# and configuring ODD_template.pkl

import   "ODD_template.pkl"
 odd1 : ODD_template.odd =  new {
   scenery {
     zone {
       region_or_state = "Sweden"
     }
     drivable_area {
       drivable_area_lane_specification {
         direction_of_travel = "right_hand_travel"
         speed_limit = 15.0
         lane_usage = true
       }
     }
   }
 }
"""


def test_drivable_area_excerpt_structure():
    module = parse_source(DRIVABLE_AREA_EXCERPT, "memory:///scen_excerpt.odd")
    assert len(module.consts) == 1
    assert module.consts[0].name == "speed_limit_global"
    assert module.consts[0].value == 30.0
    assert len(module.type_aliases) == 1
    assert module.type_aliases[0].alternatives == (
        "right_hand_travel",
        "left_hand_travel",
    )
    assert len(module.classes) == 2
    dals = module.find_class("Drivable_area_lane_specification")
    assert [p.name for p in dals.properties] == [
        "lane_dimensions",
        "lane_markings",
        "lane_type",
        "direction_of_travel",
        "speed_limit",
        "lane_usage",
    ]


def test_constraint_carries_verbatim_text_and_resolved_shape():
    module = parse_source(DRIVABLE_AREA_EXCERPT, "memory:///scen_excerpt.odd")
    lane = module.find_class("Lane_dimensions").find_property("lane_dimension")
    assert lane.constraint.source_text == "isBetween(2.7, 3.2)"
    assert lane.constraint.low == 2.7
    assert lane.constraint.high == 3.2
    assert lane.default == 2.7
    speed = module.find_class("Drivable_area_lane_specification").find_property(
        "speed_limit"
    )
    # Wrapped across two lines in the excerpt: kept exactly as written.
    assert speed.constraint.source_text == "isBetween(0,\n  speed_limit_global)"
    assert speed.constraint.low == 0.0
    assert isinstance(speed.constraint.high, ConstRef)
    assert speed.constraint.high.name == "speed_limit_global"


def test_constraint_span_fidelity():
    source = "class X {\n  v : Float (isBetween(1.0, 2.0)) = 1.0\n}\n"
    module = parse_source(source, "memory:///x.odd")
    constraint = module.classes[0].properties[0].constraint
    line = source.splitlines()[constraint.span.line - 1]
    start = constraint.span.column - 1
    assert line[start : start + constraint.span.length] == constraint.source_text


def test_instance_excerpt_structure():
    module = parse_source(INSTANCE_EXCERPT, "memory:///ODD1_test.odd")
    assert module.imports == ("ODD_template.pkl",)
    assert len(module.instances) == 1
    inst = module.instances[0]
    assert inst.name == "odd1"
    assert inst.target_type == "ODD_template.odd"
    top = inst.amendment
    assert [e.name for e in top.entries] == ["scenery"]
    scenery = top.entries[0].value
    assert isinstance(scenery, AmendmentBlock)
    assert [e.name for e in scenery.entries] == ["zone", "drivable_area"]


def test_module_header_and_annotation():
    source = (
        '@ModuleInfo { minPklVersion = "0.25.1" }\n'
        "module ODD.ODD_template.pkl\n"
        'import "scen_template.pkl"\n'
    )
    module = parse_source(source, "memory:///m.odd")
    assert module.module_name == "ODD.ODD_template.pkl"
    assert module.min_tool_version == "0.25.1"
    assert module.imports == ("scen_template.pkl",)


def test_min_tool_version_key_accepted():
    module = parse_source('@ModuleInfo { minToolVersion = "1.2.3" }\nmodule m\n')
    assert module.min_tool_version == "1.2.3"


def test_unknown_annotation_key_rejected():
    with pytest.raises(ParseError):
        parse_source('@ModuleInfo { somethingElse = "1.2.3" }\nmodule m\n')


def test_missing_close_brace_names_the_open_brace():
    source = "class Broken {\n  a : Float = 1.0\n"
    with pytest.raises(ParseError) as exc:
        parse_source(source)
    assert exc.value.span.line == 1
    assert exc.value.span.column == len("class Broken ") + 1


def test_syntax_error_reports_expected_and_found():
    with pytest.raises(ParseError) as exc:
        parse_source("const = 1.0")
    assert exc.value.expected
    assert exc.value.found == "PUNCT"


def test_duplicate_top_level_name_rejected():
    with pytest.raises(ParseError) as exc:
        parse_source("const a = 1.0\nclass a { }\n")
    assert "duplicate" in str(exc.value)


def test_duplicate_property_rejected():
    with pytest.raises(ParseError):
        parse_source("class X {\n  a : Float = 1.0\n  a : Float = 2.0\n}\n")


def test_duplicate_amendment_entry_rejected():
    with pytest.raises(ParseError):
        parse_source("x : X = new {\n  a = 1.0\n  a = 2.0\n}\n")


def test_duplicate_alias_alternative_rejected():
    with pytest.raises(ParseError):
        parse_source('typealias T = "x" | "x"\n')


def test_constraint_on_non_float_rejected():
    with pytest.raises(ParseError) as exc:
        parse_source("class X {\n  a : Boolean (isBetween(0, 1)) = true\n}\n")
    assert "Float" in str(exc.value)


def test_unsupported_constraint_rejected():
    with pytest.raises(ParseError):
        parse_source("class X {\n  a : Float (matches(1, 2)) = 1.0\n}\n")


def test_parse_is_deterministic():
    tokens = tokenize(DRIVABLE_AREA_EXCERPT, "memory:///scen.odd")
    assert parse_module(tokens, DRIVABLE_AREA_EXCERPT) == parse_module(
        tokens, DRIVABLE_AREA_EXCERPT
    )


def test_parsing_twice_yields_equal_asts():
    assert parse_source(INSTANCE_EXCERPT, "memory:///i.odd") == parse_source(
        INSTANCE_EXCERPT, "memory:///i.odd"
    )


@pytest.mark.parametrize("source", [DRIVABLE_AREA_EXCERPT, INSTANCE_EXCERPT])
def test_render_source_round_trip(source):
    module = parse_source(source, "memory:///roundtrip.odd")
    rendered = render_source(module)
    reparsed = parse_source(rendered, "memory:///roundtrip2.odd")
    assert structurally_equal(module, reparsed)


def test_render_source_round_trip_with_header_and_defaults():
    source = (
        '@ModuleInfo { minToolVersion = "0.25.1" }\n'
        "module demo.mod\n"
        'import "other.odd"\n'
        "const top = 9.5\n"
        'typealias Kind = "a" | "b"\n'
        "class X {\n"
        "  v : Float (isBetween(1.0, top)) = top\n"
        '  s : String = "q\\"uote"\n'
        "  k : Kind\n"
        "  flags : Listing\n"
        "}\n"
        "x1 : X = new {\n"
        '  k = "a"\n'
        "}\n"
    )
    module = parse_source(source, "memory:///full.odd")
    assert structurally_equal(module, parse_source(render_source(module)))
