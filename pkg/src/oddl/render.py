"""Serialization of evaluated trees to JSON, YAML, and PlantUML text.

Key order always follows template declaration order. Floats keep a decimal
part ("15.0", never "15"), booleans are lowercase, and non-finite floats
are a render error rather than invalid output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import yaml

from .source import RenderError
from .values import FloatValue, ListingValue, ObjectValue, Value


class RenderFormat(Enum):
    JSON = "json"
    YAML = "yaml"
    PLANTUML = "plantuml"


@dataclass(frozen=True)
class RenderOptions:
    format: RenderFormat = RenderFormat.JSON
    indent_width: int = 2

    def __post_init__(self) -> None:
        if not 1 <= self.indent_width <= 8:
            raise ValueError("indent_width must be between 1 and 8")


_DEFAULT = RenderOptions()


def to_plain(value: Value) -> object:
    """Plain dict/list/scalar form of a tree, validating float finiteness."""
    if isinstance(value, ObjectValue):
        return {name: to_plain(child) for name, child in value.entries}
    if isinstance(value, FloatValue):
        if not math.isfinite(value.value):
            raise RenderError(f"cannot render non-finite float {value.value!r}")
        return value.value
    if isinstance(value, ListingValue):
        out = []
        for record in value.records:
            for _, fv in record:
                if isinstance(fv, float) and not math.isfinite(fv):
                    raise RenderError(f"cannot render non-finite float {fv!r}")
            out.append(dict(record))
        return out
    return value.value


def render_json(tree: Value, opts: RenderOptions = _DEFAULT) -> str:
    """JSON text, declaration-ordered keys, no trailing newline."""
    return json.dumps(to_plain(tree), indent=opts.indent_width, allow_nan=False)


def render_yaml(tree: Value, opts: RenderOptions = _DEFAULT) -> str:
    """YAML block-style text whose generic parse equals the JSON parse."""
    text = yaml.safe_dump(
        to_plain(tree),
        sort_keys=False,
        indent=opts.indent_width,
        default_flow_style=False,
        allow_unicode=True,
    )
    return text.rstrip("\n")


def render_plantuml(tree: Value, opts: RenderOptions = _DEFAULT) -> str:
    """The JSON rendering framed for PlantUML's JSON tree visualization."""
    return f"@startjson\n{render_json(tree, opts)}\n@endjson"


_RENDERERS = {
    RenderFormat.JSON: render_json,
    RenderFormat.YAML: render_yaml,
    RenderFormat.PLANTUML: render_plantuml,
}


def render(tree: Value, opts: RenderOptions = _DEFAULT) -> str:
    return _RENDERERS[opts.format](tree, opts)
