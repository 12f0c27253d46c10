"""Shared helpers for building and evaluating test instances."""

from __future__ import annotations

from pathlib import Path

from oddl import EvalResult, ModuleGraph, evaluate, parse_source, resolve_imports

FIXTURES = Path(__file__).parent / "fixtures"

DALS = "scenery.drivable_area.drivable_area_lane_specification"
SPEED_PATH = f"{DALS}.speed_limit"
DIRECTION_PATH = f"{DALS}.direction_of_travel"
LANE_DIMENSION_PATH = f"{DALS}.lane_dimensions.lane_dimension"
LANE_USAGE_PATH = f"{DALS}.lane_usage"
LANE_TYPE_PREFIX = f"{DALS}.lane_type"
REGION_PATH = "scenery.zone.region_or_state"

LANE_TYPE_FLAGS = (
    "bus_lane",
    "traffic_lane",
    "cyclists_lane",
    "tram_lane",
    "emergency_lane",
    "shared_lane",
    "other_special_purpose_lane",
)


def instance_source(
    *,
    name: str = "odd1",
    region: str | None = "Sweden",
    lane_dimension: float | None = 2.8,
    direction: str | None = "right_hand_travel",
    speed: float | None = 15.0,
    lane_usage: bool | None = True,
    lane_type: dict[str, bool] | None = None,
    lane_markings: dict[str, bool] | None = None,
) -> str:
    """Source text for an instance of the bundled top-level template.

    Pass None to leave an attribute unconfigured.
    """

    def flag_block(label: str, flags: dict[str, bool] | None) -> list[str]:
        if not flags:
            return []
        lines = [f"        {label} {{"]
        for flag, value in flags.items():
            lines.append(f"          {flag} = {'true' if value else 'false'}")
        lines.append("        }")
        return lines

    lines = ['import "ODD_template.pkl"', "", f"{name} : ODD_template.odd = new {{"]
    lines.append("  scenery {")
    if region is not None:
        lines += ["    zone {", f'      region_or_state = "{region}"', "    }"]
    lines.append("    drivable_area {")
    lines.append("      drivable_area_lane_specification {")
    if lane_dimension is not None:
        lines += [
            "        lane_dimensions {",
            f"          lane_dimension = {lane_dimension!r}",
            "        }",
        ]
    lines += flag_block("lane_markings", lane_markings)
    lines += flag_block("lane_type", lane_type)
    if direction is not None:
        lines.append(f'        direction_of_travel = "{direction}"')
    if speed is not None:
        lines.append(f"        speed_limit = {speed!r}")
    if lane_usage is not None:
        lines.append(f"        lane_usage = {'true' if lane_usage else 'false'}")
    lines += ["      }", "    }", "  }", "}"]
    return "\n".join(lines) + "\n"


def graph_for(source: str, uri: str = "memory:///instance.odd") -> ModuleGraph:
    return resolve_imports(parse_source(source, uri))


def eval_source(
    source: str, instance: str = "odd1", tool_version: str | None = None
) -> EvalResult:
    graph = graph_for(source)
    if tool_version is None:
        return evaluate(graph, instance)
    return evaluate(graph, instance, tool_version=tool_version)


def eval_instance(**kwargs) -> EvalResult:
    return eval_source(instance_source(**kwargs))
