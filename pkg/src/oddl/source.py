"""Source locations and the toolkit's error hierarchy."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """A location in one source file. Lines and columns are 1-based."""

    file_uri: str
    line: int
    column: int
    length: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")
        if self.length < 0:
            raise ValueError("length must be non-negative")

    def describe(self) -> str:
        return f"({self.file_uri}, line {self.line})"


class OddlError(Exception):
    """Base class for every error raised by this toolkit."""


class SourceError(OddlError):
    """An error anchored to a span of source text."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is None:
            return self.message
        return f"{self.message} {self.span.describe()}"


class LexError(SourceError):
    """Illegal character, unterminated string, or unsupported escape."""


class ParseError(SourceError):
    """Token stream does not match the grammar."""

    def __init__(
        self,
        message: str,
        span: SourceSpan | None = None,
        *,
        expected: tuple[str, ...] = (),
        found: str | None = None,
    ):
        super().__init__(message, span)
        self.expected = expected
        self.found = found


class ImportResolutionError(SourceError):
    """Base class for failures while resolving a module's imports."""


class ImportCycleError(ImportResolutionError):
    def __init__(self, cycle: tuple[str, ...], span: SourceSpan | None = None):
        names = " -> ".join(cycle)
        super().__init__(f"import cycle: {names}", span)
        self.cycle = cycle


class ImportPolicyError(ImportResolutionError):
    """Import resolved to a path outside every allowed root."""

    def __init__(self, message: str, path: str, span: SourceSpan | None = None):
        super().__init__(message, span)
        self.path = path


class ImportNotFoundError(ImportResolutionError):
    """Imported file does not exist locally and is not bundled."""


class ImportGraphError(ImportResolutionError):
    """Structural problem in the module graph (e.g. two files with one name)."""


class AssetError(OddlError):
    """Problem with the bundled template assets."""


class UnknownTemplateError(AssetError):
    """Requested bundled template does not exist."""


class AssetIntegrityError(AssetError):
    """A bundled asset does not match its recorded checksum."""


class EvaluationError(OddlError):
    """Evaluation cannot proceed at all (unknown instance, recursive schema)."""


class RenderError(OddlError):
    """Value tree cannot be rendered (non-finite float)."""


class ShapeMismatchError(OddlError):
    """Two trees do not share the same template closure."""


class ProfileError(OddlError):
    """Analysis profile is ambiguous or malformed."""


class ScenarioError(OddlError):
    """Scenario file is malformed (non-scalar values, duplicate paths)."""
