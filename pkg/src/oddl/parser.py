"""Recursive-descent parser for `.odd` modules.

Accepted shape:

    @ModuleInfo { minToolVersion = "X.Y.Z" }   (optional; minPklVersion is a
    module dotted.name                          deprecated synonym)
    import "relative/path"                     (zero or more)
    const NAME = literal
    typealias NAME = "alt" | "alt" ...
    class NAME { property* }
    NAME : dotted.name = new { amendment* }    (instance)

A property is `name : Type (isBetween(lo, hi))? (= default)?`; range
constraints are only legal on Float properties. The module header line is
optional: instance files that begin directly with imports parse fine.
"""

from __future__ import annotations

from .lexer import Token, TokenKind, tokenize
from .source import ParseError, SourceSpan
from .syntax import (
    AmendmentBlock,
    AmendmentEntry,
    ClassDecl,
    ConstDecl,
    ConstraintExpr,
    ConstraintKind,
    ConstRef,
    InstanceDecl,
    Literal,
    ModuleAst,
    PropertyDecl,
    TypeAliasDecl,
    TypeRef,
)

_LITERAL_KINDS = (TokenKind.FLOAT_LIT, TokenKind.STRING_LIT, TokenKind.BOOL_LIT)

_ANNOTATION_KEYS = ("minToolVersion", "minPklVersion")


def _line_offsets(source: str) -> list[int]:
    offsets = [0]
    for i, ch in enumerate(source):
        if ch == "\n":
            offsets.append(i + 1)
    return offsets


class _Parser:
    def __init__(self, tokens: list[Token], source: str | None):
        self.tokens = tokens
        self.pos = 0
        self.source = source
        self._offsets = _line_offsets(source) if source is not None else None

    # -- cursor helpers ----------------------------------------------------

    def _peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def _at(self, kind: TokenKind, lexeme: str | None = None) -> bool:
        tok = self._peek()
        return tok.kind is kind and (lexeme is None or tok.lexeme == lexeme)

    def _describe(self, tok: Token) -> str:
        if tok.kind is TokenKind.EOF:
            return "end of file"
        return f"{tok.kind.name} {tok.lexeme!r}"

    def _error(self, expected: str, tok: Token | None = None) -> ParseError:
        tok = tok or self._peek()
        return ParseError(
            f"expected {expected}, found {self._describe(tok)}",
            tok.span,
            expected=(expected,),
            found=tok.kind.name,
        )

    def _expect(self, kind: TokenKind, lexeme: str | None = None) -> Token:
        if not self._at(kind, lexeme):
            what = f"{kind.name} {lexeme!r}" if lexeme else kind.name
            raise self._error(what)
        return self._advance()

    def _offset(self, span: SourceSpan) -> int:
        assert self._offsets is not None
        return self._offsets[span.line - 1] + span.column - 1

    def _slice(self, start: Token, end: Token) -> str | None:
        """Verbatim source between two tokens (inclusive), when available."""
        if self.source is None:
            return None
        begin = self._offset(start.span)
        stop = self._offset(end.span) + end.span.length
        return self.source[begin:stop]

    # -- grammar -----------------------------------------------------------

    def parse(self) -> ModuleAst:
        file_uri = self.tokens[-1].span.file_uri
        min_tool_version = self._annotation()
        module_name = ""
        if self._at(TokenKind.KEYWORD, "module"):
            self._advance()
            module_name, _ = self._dotted_name()
        imports: list[str] = []
        import_spans: list[SourceSpan] = []
        while self._at(TokenKind.KEYWORD, "import"):
            self._advance()
            tok = self._expect(TokenKind.STRING_LIT)
            imports.append(str(tok.value))
            import_spans.append(tok.span)
        consts: list[ConstDecl] = []
        aliases: list[TypeAliasDecl] = []
        classes: list[ClassDecl] = []
        instances: list[InstanceDecl] = []
        seen: dict[str, SourceSpan] = {}

        def declare(name: str, span: SourceSpan) -> None:
            if name in seen:
                raise ParseError(
                    f"duplicate top-level declaration of '{name}'", span
                )
            seen[name] = span

        while not self._at(TokenKind.EOF):
            if self._at(TokenKind.KEYWORD, "const"):
                decl = self._const_decl()
                declare(decl.name, decl.span)
                consts.append(decl)
            elif self._at(TokenKind.KEYWORD, "typealias"):
                alias = self._alias_decl()
                declare(alias.name, alias.span)
                aliases.append(alias)
            elif self._at(TokenKind.KEYWORD, "class"):
                cls = self._class_decl()
                declare(cls.name, cls.span)
                classes.append(cls)
            elif self._at(TokenKind.IDENT):
                inst = self._instance_decl()
                declare(inst.name, inst.span)
                instances.append(inst)
            else:
                raise self._error("a declaration (const, typealias, class, or instance)")
        return ModuleAst(
            module_name=module_name,
            min_tool_version=min_tool_version,
            imports=tuple(imports),
            consts=tuple(consts),
            type_aliases=tuple(aliases),
            classes=tuple(classes),
            instances=tuple(instances),
            file_uri=file_uri,
            source_text=self.source or "",
            import_spans=tuple(import_spans),
        )

    def _annotation(self) -> str | None:
        if not self._at(TokenKind.ANNOTATION):
            return None
        tok = self._advance()
        if tok.lexeme != "@ModuleInfo":
            raise ParseError(f"unknown annotation '{tok.lexeme}'", tok.span)
        self._expect(TokenKind.PUNCT, "{")
        key = self._expect(TokenKind.IDENT)
        if key.lexeme not in _ANNOTATION_KEYS:
            raise ParseError(
                f"unknown @ModuleInfo key '{key.lexeme}' "
                f"(expected one of {', '.join(_ANNOTATION_KEYS)})",
                key.span,
            )
        self._expect(TokenKind.PUNCT, "=")
        value = self._expect(TokenKind.STRING_LIT)
        self._expect(TokenKind.PUNCT, "}")
        return str(value.value)

    def _dotted_name(self) -> tuple[str, SourceSpan]:
        first = self._expect(TokenKind.IDENT)
        parts = [first.lexeme]
        while self._at(TokenKind.PUNCT, "."):
            self._advance()
            parts.append(self._expect(TokenKind.IDENT).lexeme)
        return ".".join(parts), first.span

    def _literal(self) -> tuple[Literal, Token]:
        tok = self._peek()
        if tok.kind not in _LITERAL_KINDS:
            raise self._error("a literal (number, string, or boolean)")
        self._advance()
        return tok.value, tok  # type: ignore[return-value]

    def _const_decl(self) -> ConstDecl:
        self._advance()  # 'const'
        name = self._expect(TokenKind.IDENT)
        self._expect(TokenKind.PUNCT, "=")
        value, _ = self._literal()
        return ConstDecl(name=name.lexeme, value=value, span=name.span)

    def _alias_decl(self) -> TypeAliasDecl:
        self._advance()  # 'typealias'
        name = self._expect(TokenKind.IDENT)
        self._expect(TokenKind.PUNCT, "=")
        alternatives: list[str] = []
        tok = self._expect(TokenKind.STRING_LIT)
        alternatives.append(str(tok.value))
        while self._at(TokenKind.PUNCT, "|"):
            self._advance()
            tok = self._expect(TokenKind.STRING_LIT)
            if tok.value in alternatives:
                raise ParseError(
                    f"duplicate alternative {tok.value!r} in typealias '{name.lexeme}'",
                    tok.span,
                )
            alternatives.append(str(tok.value))
        return TypeAliasDecl(
            name=name.lexeme, alternatives=tuple(alternatives), span=name.span
        )

    def _class_decl(self) -> ClassDecl:
        self._advance()  # 'class'
        name = self._expect(TokenKind.IDENT)
        open_brace = self._expect(TokenKind.PUNCT, "{")
        properties: list[PropertyDecl] = []
        names: set[str] = set()
        while not self._at(TokenKind.PUNCT, "}"):
            if self._at(TokenKind.EOF):
                raise ParseError(
                    f"class '{name.lexeme}' body is never closed; it opens here",
                    open_brace.span,
                )
            prop = self._property_decl()
            if prop.name in names:
                raise ParseError(
                    f"duplicate property '{prop.name}' in class '{name.lexeme}'",
                    prop.span,
                )
            names.add(prop.name)
            properties.append(prop)
        self._advance()  # '}'
        return ClassDecl(name=name.lexeme, properties=tuple(properties), span=name.span)

    def _property_decl(self) -> PropertyDecl:
        name = self._expect(TokenKind.IDENT)
        self._expect(TokenKind.PUNCT, ":")
        type_name, type_span = self._dotted_name()
        typeref = TypeRef(name=type_name, span=type_span)
        constraint = None
        if self._at(TokenKind.PUNCT, "("):
            constraint = self._constraint()
            if type_name != "Float":
                raise ParseError(
                    "range constraints are only allowed on Float properties",
                    constraint.span,
                )
        default: Literal | ConstRef | None = None
        if self._at(TokenKind.PUNCT, "="):
            self._advance()
            if self._at(TokenKind.IDENT):
                ref = self._advance()
                default = ConstRef(name=ref.lexeme, span=ref.span)
            else:
                default, _ = self._literal()
        return PropertyDecl(
            name=name.lexeme,
            declared_type=typeref,
            constraint=constraint,
            default=default,
            span=name.span,
        )

    def _constraint(self) -> ConstraintExpr:
        self._expect(TokenKind.PUNCT, "(")
        head = self._expect(TokenKind.IDENT)
        if head.lexeme != "isBetween":
            raise ParseError(
                f"unsupported constraint '{head.lexeme}' (only isBetween is defined)",
                head.span,
            )
        self._expect(TokenKind.PUNCT, "(")
        low, low_tok = self._constraint_arg()
        self._expect(TokenKind.PUNCT, ",")
        high, high_tok = self._constraint_arg()
        close = self._expect(TokenKind.PUNCT, ")")
        self._expect(TokenKind.PUNCT, ")")
        text = self._slice(head, close)
        if text is None:
            # No source at hand: reassemble from the lexemes.
            text = f"isBetween({low_tok.lexeme}, {high_tok.lexeme})"
        span = SourceSpan(
            head.span.file_uri, head.span.line, head.span.column, len(text)
        )
        return ConstraintExpr(
            kind=ConstraintKind.IS_BETWEEN,
            low=low,
            high=high,
            source_text=text,
            span=span,
        )

    def _constraint_arg(self) -> tuple[float | ConstRef, Token]:
        if self._at(TokenKind.FLOAT_LIT):
            tok = self._advance()
            return float(tok.value), tok  # type: ignore[arg-type]
        if self._at(TokenKind.IDENT):
            tok = self._advance()
            return ConstRef(name=tok.lexeme, span=tok.span), tok
        raise self._error("a number or constant name")

    def _instance_decl(self) -> InstanceDecl:
        name = self._expect(TokenKind.IDENT)
        self._expect(TokenKind.PUNCT, ":")
        target, _ = self._dotted_name()
        self._expect(TokenKind.PUNCT, "=")
        self._expect(TokenKind.KEYWORD, "new")
        open_brace = self._expect(TokenKind.PUNCT, "{")
        block = self._amendment_block(open_brace)
        return InstanceDecl(
            name=name.lexeme, target_type=target, amendment=block, span=name.span
        )

    def _amendment_block(self, open_brace: Token) -> AmendmentBlock:
        entries: list[AmendmentEntry] = []
        names: set[str] = set()
        while not self._at(TokenKind.PUNCT, "}"):
            if self._at(TokenKind.EOF):
                raise ParseError(
                    "amendment block is never closed; it opens here",
                    open_brace.span,
                )
            entry_name = self._expect(TokenKind.IDENT)
            if entry_name.lexeme in names:
                raise ParseError(
                    f"duplicate amendment entry '{entry_name.lexeme}'",
                    entry_name.span,
                )
            names.add(entry_name.lexeme)
            if self._at(TokenKind.PUNCT, "="):
                self._advance()
                value, _ = self._literal()
                entries.append(
                    AmendmentEntry(
                        name=entry_name.lexeme, value=value, span=entry_name.span
                    )
                )
            elif self._at(TokenKind.PUNCT, "{"):
                inner_brace = self._advance()
                nested = self._amendment_block(inner_brace)
                entries.append(
                    AmendmentEntry(
                        name=entry_name.lexeme, value=nested, span=entry_name.span
                    )
                )
            else:
                raise self._error("'=' or '{' after amendment entry name")
        self._advance()  # '}'
        return AmendmentBlock(entries=tuple(entries))


def parse_module(tokens: list[Token], source: str | None = None) -> ModuleAst:
    """Parse a token stream (as produced by `tokenize`) into a ModuleAst.

    Passing the original `source` lets constraint text and diagnostics quote
    the file verbatim.
    """
    stripped = [t for t in tokens if t.kind is not TokenKind.COMMENT]
    if not stripped or stripped[-1].kind is not TokenKind.EOF:
        raise ValueError("token stream must end with an EOF token")
    return _Parser(stripped, source).parse()


def parse_source(source: str, file_uri: str = "memory:///input.odd") -> ModuleAst:
    """Tokenize and parse in one step."""
    return parse_module(tokenize(source, file_uri), source)
