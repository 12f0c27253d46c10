"""Module graph construction with a local-filesystem security policy.

Import strings are relative paths; `.pkl` suffixes are accepted and mapped
onto the `.odd` assets so published template excerpts load unchanged.
Resolution prefers a file next to the importing module (when the policy
allows its directory), then falls back to the bundled standard templates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Mapping
from urllib.request import url2pathname
from urllib.parse import urlparse

from .parser import parse_source
from .source import (
    ImportCycleError,
    ImportGraphError,
    ImportNotFoundError,
    ImportPolicyError,
    SourceSpan,
)
from .syntax import ModuleAst

Loader = Callable[[Path], str]


@dataclass(frozen=True)
class ImportPolicy:
    """Which directories imports may be loaded from."""

    allowed_roots: frozenset[Path] = frozenset()
    allow_bundled: bool = True

    def permits(self, path: Path) -> bool:
        return any(path.is_relative_to(root) for root in self.allowed_roots)

    @staticmethod
    def for_file(path: Path, extra_roots: tuple[Path, ...] = ()) -> "ImportPolicy":
        roots = {path.resolve().parent, *(r.resolve() for r in extra_roots)}
        return ImportPolicy(allowed_roots=frozenset(roots))


@dataclass(frozen=True)
class ModuleGraph:
    """Entry module plus everything it transitively imports, keyed by the
    import name (file stem). Immutable after construction."""

    entry: str
    modules: Mapping[str, ModuleAst]

    def entry_module(self) -> ModuleAst:
        return self.modules[self.entry]


def _default_loader(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _map_import(import_string: str) -> str:
    if import_string.endswith(".pkl"):
        return import_string[: -len(".pkl")] + ".odd"
    return import_string


def _module_key(import_string: str) -> str:
    return Path(_map_import(import_string)).stem


def _path_from_uri(uri: str) -> Path | None:
    parsed = urlparse(uri)
    if parsed.scheme != "file":
        return None
    return Path(url2pathname(parsed.path))


def _entry_key(entry: ModuleAst) -> str:
    if entry.file_uri:
        stem = Path(urlparse(entry.file_uri).path).stem
        if stem:
            return stem
    if entry.module_name:
        return entry.module_name
    return "<entry>"


def default_policy(entry: ModuleAst) -> ImportPolicy:
    path = _path_from_uri(entry.file_uri) if entry.file_uri else None
    if path is not None:
        return ImportPolicy.for_file(path)
    return ImportPolicy()


@dataclass
class _Resolver:
    loader: Loader
    policy: ImportPolicy
    modules: dict[str, ModuleAst] = field(default_factory=dict)
    origins: dict[str, Path | None] = field(default_factory=dict)
    bundled: set[str] = field(default_factory=set)

    def _locate(
        self, import_string: str, base_dir: Path | None, from_bundle: bool, span: SourceSpan
    ) -> tuple[Path, bool]:
        """Decide which file an import names, without reading it."""
        from . import assets  # deferred: assets parses through this package

        rel = _map_import(import_string)
        filename = Path(rel).name
        bundled = assets.bundled_path(filename)
        if from_bundle:
            # Bundled templates only ever see their sibling assets.
            if bundled is None:
                raise ImportNotFoundError(
                    f"imported file '{filename}' not found in the bundle", span
                )
            return bundled, True
        candidate = (base_dir / rel).resolve() if base_dir is not None else None
        if candidate is not None and candidate.is_file():
            if self.policy.permits(candidate):
                return candidate, False
            if not (self.policy.allow_bundled and bundled is not None):
                raise ImportPolicyError(
                    f"import '{import_string}' resolves to {candidate}, "
                    "which is outside every allowed root",
                    str(candidate),
                    span,
                )
        if self.policy.allow_bundled and bundled is not None:
            return bundled, True
        attempted = str(candidate) if candidate is not None else rel
        raise ImportNotFoundError(f"imported file not found: {attempted}", span)

    def _parse_at(self, origin: Path, is_bundled: bool) -> ModuleAst:
        from . import assets

        if is_bundled:
            return parse_source(assets.read_bundled(origin.name), origin.as_uri())
        return parse_source(self.loader(origin), origin.as_uri())

    def visit(self, key: str, ast: ModuleAst, from_bundle: bool, chain: tuple[str, ...]) -> None:
        base_path = _path_from_uri(ast.file_uri) if ast.file_uri else None
        base_dir = base_path.parent if base_path is not None else None
        spans = ast.import_spans or (None,) * len(ast.imports)
        path_here = (*chain, key)
        for import_string, span in zip(ast.imports, spans):
            child_key = _module_key(import_string)
            if child_key in path_here:
                cycle = path_here[path_here.index(child_key) :]
                raise ImportCycleError((*cycle, child_key), span)
            origin, is_bundled = self._locate(import_string, base_dir, from_bundle, span)
            if child_key in self.modules:
                existing = self.origins.get(child_key)
                if existing is not None and existing != origin:
                    raise ImportGraphError(
                        f"two different files would both load as module "
                        f"'{child_key}': {existing} and {origin}",
                        span,
                    )
                continue  # diamond import: already loaded and visited
            child = self._parse_at(origin, is_bundled)
            self.modules[child_key] = child
            self.origins[child_key] = origin
            if is_bundled:
                self.bundled.add(child_key)
            self.visit(child_key, child, is_bundled, path_here)


def resolve_imports(
    entry: ModuleAst,
    loader: Loader | None = None,
    policy: ImportPolicy | None = None,
) -> ModuleGraph:
    """Load `entry`'s transitive imports into an acyclic ModuleGraph.

    Each module appears exactly once; cycles, policy violations, and missing
    files raise with the importing span attached.
    """
    resolver = _Resolver(
        loader=loader or _default_loader,
        policy=policy if policy is not None else default_policy(entry),
    )
    entry_key = _entry_key(entry)
    resolver.modules[entry_key] = entry
    resolver.origins[entry_key] = _path_from_uri(entry.file_uri)
    from . import assets

    entry_is_bundled = (
        resolver.origins[entry_key] is not None
        and assets.is_bundled_path(resolver.origins[entry_key])
    )
    resolver.visit(entry_key, entry, entry_is_bundled, ())
    return ModuleGraph(entry=entry_key, modules=MappingProxyType(dict(resolver.modules)))


def load_module_graph(
    path: Path,
    loader: Loader | None = None,
    policy: ImportPolicy | None = None,
) -> ModuleGraph:
    """Parse the file at `path` and resolve its imports."""
    resolved = Path(path).resolve()
    text = (loader or _default_loader)(resolved)
    entry = parse_source(text, resolved.as_uri())
    return resolve_imports(entry, loader=loader, policy=policy)
