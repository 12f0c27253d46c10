"""Bundled ISO 34503 ODD templates.

The four standard templates ship inside the package and are loaded on
demand. Their SHA-256 checksums are recorded in `checksums.json` and
verified on first read, so a corrupted installation fails loudly instead of
silently validating against the wrong schema.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from ..source import AssetIntegrityError, UnknownTemplateError
from ..syntax import ModuleAst

_ASSET_DIR = Path(__file__).resolve().parent

# Listing order is part of the public contract.
_STANDARD = {
    "odd_template": "ODD_template.odd",
    "scen_template": "scen_template.odd",
    "env_template": "env_template.odd",
    "dyn_template": "dyn_template.odd",
}

_FILENAMES = frozenset(_STANDARD.values())

_verified: dict[str, str] = {}


@dataclass(frozen=True)
class TemplateAsset:
    """One bundled template: its name, raw source, and declared version gate."""

    name: str
    source_text: str
    declared_min_tool_version: str | None


def list_standard_templates() -> list[str]:
    """Names of the bundled templates, in stable order."""
    return list(_STANDARD)


def is_bundled(filename: str) -> bool:
    return filename in _FILENAMES


def is_bundled_path(path: Path) -> bool:
    try:
        return path.resolve().parent == _ASSET_DIR and path.name in _FILENAMES
    except OSError:  # pragma: no cover - exotic filesystems
        return False


def bundled_path(filename: str) -> Path | None:
    if filename not in _FILENAMES:
        return None
    return _ASSET_DIR / filename


def _checksums() -> dict[str, str]:
    with open(_ASSET_DIR / "checksums.json", encoding="utf-8") as fh:
        return json.load(fh)


def read_bundled(filename: str) -> str:
    """Raw text of a bundled asset, checksum-verified once per process."""
    path = bundled_path(filename)
    if path is None:
        raise UnknownTemplateError(f"no bundled asset named '{filename}'")
    data = path.read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    if filename in _verified:
        if _verified[filename] != digest:  # pragma: no cover - mutated mid-run
            raise AssetIntegrityError(f"bundled asset '{filename}' changed on disk")
    else:
        expected = _checksums().get(filename)
        if expected != digest:
            raise AssetIntegrityError(
                f"bundled asset '{filename}' does not match its recorded checksum"
            )
        _verified[filename] = digest
    return data.decode("utf-8")


def get_asset(name: str) -> TemplateAsset:
    """The named standard template as raw, verified source."""
    if name not in _STANDARD:
        raise UnknownTemplateError(
            f"unknown standard template '{name}' "
            f"(available: {', '.join(_STANDARD)})"
        )
    from ..parser import parse_source

    filename = _STANDARD[name]
    text = read_bundled(filename)
    ast = parse_source(text, (_ASSET_DIR / filename).as_uri())
    return TemplateAsset(
        name=name, source_text=text, declared_min_tool_version=ast.min_tool_version
    )


def load_standard_graph(name: str):
    """Parse the named template and resolve its (bundle-internal) imports."""
    from ..imports import resolve_imports
    from ..parser import parse_source

    if name not in _STANDARD:
        raise UnknownTemplateError(
            f"unknown standard template '{name}' "
            f"(available: {', '.join(_STANDARD)})"
        )
    filename = _STANDARD[name]
    text = read_bundled(filename)
    entry = parse_source(text, (_ASSET_DIR / filename).as_uri())
    return resolve_imports(entry)


def load_standard_template(name: str) -> ModuleAst:
    """The parsed, import-resolved AST of the named bundled template."""
    return load_standard_graph(name).entry_module()
