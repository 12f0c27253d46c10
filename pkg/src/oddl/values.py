"""Immutable, fully evaluated configuration trees.

Object nodes keep their entries in template declaration order and are
tagged with the class (and module) they were built from. Amending never
mutates: new trees share every untouched subtree with the old one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

Scalar = Union[float, bool, str]

# One listing record: ordered (field, scalar) pairs.
Record = tuple[tuple[str, Scalar], ...]


@dataclass(frozen=True)
class FloatValue:
    value: float
    # Declared inclusive range, resolved from the schema constraint.
    low: float | None = None
    high: float | None = None


@dataclass(frozen=True)
class BoolValue:
    value: bool


@dataclass(frozen=True)
class StringValue:
    value: str


@dataclass(frozen=True)
class EnumValue:
    """A string restricted to the alternatives of its type alias."""

    value: str
    alias: str
    alternatives: tuple[str, ...]


@dataclass(frozen=True)
class ListingValue:
    """An ordered collection of flat records (scalar fields only)."""

    records: tuple[Record, ...] = ()


@dataclass(frozen=True)
class ObjectValue:
    class_name: str
    module_key: str
    entries: tuple[tuple[str, "Value"], ...]

    def keys(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def get(self, name: str) -> "Value | None":
        for entry_name, value in self.entries:
            if entry_name == name:
                return value
        return None

    def replace_entry(self, name: str, value: "Value") -> "ObjectValue":
        entries = tuple(
            (entry_name, value if entry_name == name else old)
            for entry_name, old in self.entries
        )
        return ObjectValue(self.class_name, self.module_key, entries)


Value = Union[FloatValue, BoolValue, StringValue, EnumValue, ListingValue, ObjectValue]
LeafValue = Union[FloatValue, BoolValue, StringValue, EnumValue, ListingValue]


def format_float(x: float) -> str:
    """Shortest round-trip rendering, always with a decimal part ("15.0")."""
    return repr(float(x))


def format_scalar(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return value


def leaf_scalar(leaf: LeafValue) -> object:
    """The plain-Python payload of a leaf (listings become lists of dicts)."""
    if isinstance(leaf, ListingValue):
        return [dict(record) for record in leaf.records]
    return leaf.value


def join_path(prefix: str, name: str) -> str:
    return f"{prefix}.{name}" if prefix else name


def resolve_path(tree: ObjectValue, path: str) -> Value | None:
    """Follow a dotted attribute path; None when any segment is missing."""
    node: Value = tree
    for segment in path.split("."):
        if not isinstance(node, ObjectValue):
            return None
        child = node.get(segment)
        if child is None:
            return None
        node = child
    return node


def iter_leaves(tree: ObjectValue, prefix: str = "") -> Iterator[tuple[str, LeafValue]]:
    """All (dotted path, leaf) pairs in declaration order."""
    for name, value in tree.entries:
        path = join_path(prefix, name)
        if isinstance(value, ObjectValue):
            yield from iter_leaves(value, path)
        else:
            yield path, value


def leaf_paths(tree: ObjectValue) -> tuple[str, ...]:
    return tuple(path for path, _ in iter_leaves(tree))
