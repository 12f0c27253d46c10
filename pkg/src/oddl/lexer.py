"""Tokenizer for `.odd` source files.

Comments (`#` and `//` to end of line) are kept as COMMENT tokens so the
token stream plus skipped whitespace reconstructs the source exactly; the
parser discards them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from .source import LexError, SourceSpan


class TokenKind(Enum):
    KEYWORD = auto()
    IDENT = auto()
    FLOAT_LIT = auto()
    STRING_LIT = auto()
    BOOL_LIT = auto()
    PUNCT = auto()
    ANNOTATION = auto()
    COMMENT = auto()
    EOF = auto()


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: SourceSpan
    value: object = None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Token({self.kind.name}, {self.lexeme!r}, line {self.span.line})"


KEYWORDS = frozenset({"module", "import", "const", "typealias", "class", "new"})

_PUNCT = frozenset("{}()=:,|.")


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class _Lexer:
    def __init__(self, source: str, file_uri: str):
        self.source = source
        self.file_uri = file_uri
        self.pos = 0
        self.line = 1
        self.col = 1

    def _peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.source[i] if i < len(self.source) else ""

    def _advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def _span_from(self, line: int, col: int, length: int) -> SourceSpan:
        return SourceSpan(self.file_uri, line, col, length)

    def _error(self, message: str, line: int, col: int, length: int = 1) -> LexError:
        return LexError(message, self._span_from(line, col, max(length, 1)))

    def _skip_whitespace(self) -> None:
        while self.pos < len(self.source) and self.source[self.pos] in " \t\r\n":
            self._advance()

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            self._skip_whitespace()
            line, col = self.line, self.col
            if self.pos >= len(self.source):
                out.append(Token(TokenKind.EOF, "", self._span_from(line, col, 0)))
                return out
            ch = self._peek()
            if ch == "#" or (ch == "/" and self._peek(1) == "/"):
                out.append(self._comment(line, col))
            elif ch == '"':
                out.append(self._string(line, col))
            elif ch.isdigit():
                out.append(self._number(line, col))
            elif _is_ident_start(ch):
                out.append(self._word(line, col))
            elif ch == "@":
                out.append(self._annotation(line, col))
            elif ch in _PUNCT:
                self._advance()
                out.append(Token(TokenKind.PUNCT, ch, self._span_from(line, col, 1)))
            else:
                raise self._error(f"illegal character {ch!r}", line, col)

    def _comment(self, line: int, col: int) -> Token:
        start = self.pos
        while self.pos < len(self.source) and self._peek() != "\n":
            self._advance()
        text = self.source[start : self.pos]
        return Token(TokenKind.COMMENT, text, self._span_from(line, col, len(text)))

    def _string(self, line: int, col: int) -> Token:
        start = self.pos
        self._advance()  # opening quote
        value: list[str] = []
        while True:
            if self.pos >= len(self.source) or self._peek() == "\n":
                raise self._error("unterminated string literal", line, col)
            ch = self._advance()
            if ch == '"':
                break
            if ch == "\\":
                if self.pos >= len(self.source):
                    raise self._error("unterminated string literal", line, col)
                esc = self._advance()
                if esc not in ('"', "\\"):
                    raise self._error(
                        f"unsupported escape sequence '\\{esc}'", line, col
                    )
                value.append(esc)
            else:
                value.append(ch)
        text = self.source[start : self.pos]
        return Token(
            TokenKind.STRING_LIT,
            text,
            self._span_from(line, col, len(text)),
            "".join(value),
        )

    def _number(self, line: int, col: int) -> Token:
        start = self.pos
        while self.pos < len(self.source) and self._peek().isdigit():
            self._advance()
        # A dot only belongs to the number when a digit follows; a bare dot
        # stays punctuation so dotted names keep working.
        if self._peek() == "." and self._peek(1).isdigit():
            self._advance()
            while self.pos < len(self.source) and self._peek().isdigit():
                self._advance()
        text = self.source[start : self.pos]
        return Token(
            TokenKind.FLOAT_LIT,
            text,
            self._span_from(line, col, len(text)),
            float(text),
        )

    def _word(self, line: int, col: int) -> Token:
        start = self.pos
        while self.pos < len(self.source) and _is_ident_part(self._peek()):
            self._advance()
        text = self.source[start : self.pos]
        span = self._span_from(line, col, len(text))
        if text in ("true", "false"):
            return Token(TokenKind.BOOL_LIT, text, span, text == "true")
        if text in KEYWORDS:
            return Token(TokenKind.KEYWORD, text, span)
        return Token(TokenKind.IDENT, text, span)

    def _annotation(self, line: int, col: int) -> Token:
        start = self.pos
        self._advance()  # '@'
        if not _is_ident_start(self._peek()):
            raise self._error("'@' must introduce an annotation name", line, col)
        while self.pos < len(self.source) and _is_ident_part(self._peek()):
            self._advance()
        text = self.source[start : self.pos]
        return Token(TokenKind.ANNOTATION, text, self._span_from(line, col, len(text)))


def tokenize(source: str, file_uri: str = "memory:///input.odd") -> list[Token]:
    """Tokenize `source`, returning COMMENT tokens and a final EOF token.

    Raises LexError (with a span) on illegal characters, unterminated
    strings, or unsupported escapes.
    """
    return _Lexer(source, file_uri).tokens()
