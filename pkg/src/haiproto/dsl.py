"""Parser and canonical printer for the ``.hai`` protocol language.

A ``.hai`` file is a sequence of declarations, each ended by ``;``::

    role supervisor;
    action annotate-sample(X, Y) :=
        provide(Y: output.label, X: input.raw_data|fvector) <- map(X, Y);
    message A6 := user -> model : annotate-sample(X, Y) [X: WalkStand];
    pattern sample-annotation := [A5, A6] @ hitl;

``//`` starts a comment running to end of line.  Comments are preserved:
full-line comments attach to the following declaration, a same-line comment
after the closing ``;`` attaches to that declaration, and comments after the
last declaration attach to the file.

:func:`parse` never raises on bad input; it reports diagnostics and recovers
at the next ``;``.  :func:`print_source` emits the canonical form, and
``parse(print_source(parse(text)))`` reproduces the same declarations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .core import (
    OP_ARITY,
    TAGS,
    ActionDef,
    Arg,
    BaseType,
    GroupType,
    ListType,
    Message,
    Modifier,
    OpKind,
    Operation,
    Pattern,
    PrimitiveKind,
    PrimitiveSpec,
    Role,
    TypeExpr,
)

# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    """A source location: 1-based line and column, plus length in chars."""

    line: int
    col: int
    length: int = 1


@dataclass(frozen=True)
class Diagnostic:
    """A single checker or parser finding."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    path: str = "<input>"
    span: Span | None = field(default=None, compare=False)

    def format(self) -> str:
        line = self.span.line if self.span else 0
        col = self.span.col if self.span else 0
        return f"{self.path}:{line}:{col}: {self.severity}[{self.code}]: {self.message}"


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
    ";": "SEMI",
    ".": "DOT",
    "|": "PIPE",
    "@": "AT",
    "=": "EQ",
}


@dataclass(frozen=True)
class Token:
    kind: str  # ID, STRING, ASSIGN, ARROW, LARROW, COLON, EOF, or a _PUNCT name
    value: str
    span: Span


class LexError(Exception):
    def __init__(self, message: str, span: Span) -> None:
        super().__init__(message)
        self.message = message
        self.span = span


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha()


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(text: str) -> tuple[list[Token], list[tuple[Span, str]]]:
    """Split ``text`` into tokens and comments.

    Comments are returned separately as ``(span, text)`` pairs with the
    leading ``//`` and surrounding whitespace stripped.  Raises
    :class:`LexError` on characters outside the language.
    """
    tokens: list[Token] = []
    comments: list[tuple[Span, str]] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and text[i : i + 2] == "//":
            start = i
            while i < n and text[i] != "\n":
                i += 1
            body = text[start + 2 : i].strip()
            comments.append((Span(line, col, i - start), body))
            col += i - start
            continue
        if ch == ":" and text[i : i + 2] == ":=":
            tokens.append(Token("ASSIGN", ":=", Span(line, col, 2)))
            i += 2
            col += 2
            continue
        if ch == ":":
            tokens.append(Token("COLON", ":", Span(line, col, 1)))
            i += 1
            col += 1
            continue
        if ch == "-" and text[i : i + 2] == "->":
            tokens.append(Token("ARROW", "->", Span(line, col, 2)))
            i += 2
            col += 2
            continue
        if ch == "<" and text[i : i + 2] == "<-":
            tokens.append(Token("LARROW", "<-", Span(line, col, 2)))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, Span(line, col, 1)))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            out: list[str] = []
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise LexError("unterminated string", Span(line, col, j - i))
                if text[j] == "\\" and j + 1 < n and text[j + 1] in ('"', "\\"):
                    out.append(text[j + 1])
                    j += 2
                    continue
                out.append(text[j])
                j += 1
            if j >= n:
                raise LexError("unterminated string", Span(line, col, j - i))
            length = j + 1 - i
            tokens.append(Token("STRING", "".join(out), Span(line, col, length)))
            i = j + 1
            col += length
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n:
                if _is_ident_part(text[j]):
                    j += 1
                elif text[j] == "-" and j + 1 < n and _is_ident_part(text[j + 1]):
                    # Hyphen continues an identifier only when followed by a
                    # word character, so "user -> model" still lexes an arrow.
                    j += 2
                else:
                    break
            value = text[i:j]
            tokens.append(Token("ID", value, Span(line, col, j - i)))
            col += j - i
            i = j
            continue
        raise LexError(f"unexpected character {ch!r}", Span(line, col, 1))
    tokens.append(Token("EOF", "", Span(line, col, 0)))
    return tokens, comments


# ---------------------------------------------------------------------------
# Syntax tree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoleDecl:
    name: str
    leading_comments: tuple[str, ...] = ()
    trailing_comment: str | None = None
    span: Span = field(default=Span(0, 0, 0), compare=False)


@dataclass(frozen=True)
class ActionDecl:
    action: ActionDef
    leading_comments: tuple[str, ...] = ()
    trailing_comment: str | None = None
    span: Span = field(default=Span(0, 0, 0), compare=False)


@dataclass(frozen=True)
class MessageDecl:
    message: Message
    leading_comments: tuple[str, ...] = ()
    trailing_comment: str | None = None
    span: Span = field(default=Span(0, 0, 0), compare=False)


@dataclass(frozen=True)
class PatternDecl:
    pattern: Pattern
    leading_comments: tuple[str, ...] = ()
    trailing_comment: str | None = None
    span: Span = field(default=Span(0, 0, 0), compare=False)


Decl = Union[RoleDecl, ActionDecl, MessageDecl, PatternDecl]


@dataclass(frozen=True)
class SourceFile:
    decls: tuple[Decl, ...]
    trailing_comments: tuple[str, ...] = ()
    path: str = field(default="<input>", compare=False)


@dataclass(frozen=True)
class ParseResult:
    """Outcome of :func:`parse`: a file (or ``None`` on error) + diagnostics."""

    file: SourceFile | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.file is not None


class _ParseAbort(Exception):
    """Internal: unwinds to the recovery point after a syntax error."""


class _Parser:
    def __init__(self, tokens: list[Token], comments: list[tuple[Span, str]], path: str):
        self.tokens = tokens
        self.comments = comments
        self.path = path
        self.pos = 0
        self.comment_pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, span: Span, code: str = "E-SYNTAX") -> None:
        self.diagnostics.append(Diagnostic("error", code, message, self.path, span))

    def fail(self, message: str, span: Span, code: str = "E-SYNTAX") -> None:
        self.error(message, span, code)
        raise _ParseAbort()

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            got = tok.value if tok.kind != "EOF" else "end of file"
            self.fail(f"expected {what}, got {got!r}", tok.span)
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        return self.expect("ID", what)

    def match(self, kind: str) -> Token | None:
        if self.peek().kind == kind:
            return self.advance()
        return None

    # -- comments -----------------------------------------------------------

    def take_leading_comments(self) -> tuple[str, ...]:
        """Consume comments that occur before the next token."""
        next_tok = self.peek()
        out: list[str] = []
        while self.comment_pos < len(self.comments):
            span, text = self.comments[self.comment_pos]
            before = next_tok.kind == "EOF" or (span.line, span.col) < (
                next_tok.span.line,
                next_tok.span.col,
            )
            if not before:
                break
            out.append(text)
            self.comment_pos += 1
        return tuple(out)

    def take_trailing_comment(self, semi: Token) -> str | None:
        """Consume a comment sitting on the same line as the closing ``;``."""
        if self.comment_pos < len(self.comments):
            span, text = self.comments[self.comment_pos]
            if span.line == semi.span.line and span.col > semi.span.col:
                self.comment_pos += 1
                return text
        return None

    # -- grammar ------------------------------------------------------------

    def parse_file(self) -> tuple[SourceFile | None, list[Diagnostic]]:
        decls: list[Decl] = []
        names: set[str] = set()
        had_error = False
        while True:
            leading = self.take_leading_comments()
            if self.peek().kind == "EOF":
                trailing_file = leading
                break
            try:
                decl = self.parse_decl(leading)
            except _ParseAbort:
                had_error = True
                self.recover()
                continue
            name = _decl_name(decl)
            if name in names:
                self.error(
                    f"duplicate declaration name {name!r}",
                    _decl_span(decl),
                    "E-DUP-NAME",
                )
                had_error = True
                continue
            names.add(name)
            decls.append(decl)
        if had_error or any(d.severity == "error" for d in self.diagnostics):
            return None, self.diagnostics
        return SourceFile(tuple(decls), trailing_file, self.path), self.diagnostics

    def recover(self) -> None:
        """Skip tokens until just past the next ``;`` (or EOF)."""
        while True:
            tok = self.advance()
            if tok.kind in ("SEMI", "EOF"):
                return

    def parse_decl(self, leading: tuple[str, ...]) -> Decl:
        tok = self.peek()
        if tok.kind != "ID":
            self.fail(f"expected declaration, got {tok.value!r}", tok.span)
        if tok.value == "role":
            return self.parse_role(leading)
        if tok.value == "action":
            return self.parse_action(leading)
        if tok.value == "message":
            return self.parse_message(leading)
        if tok.value == "pattern":
            return self.parse_pattern(leading)
        self.fail(
            f"expected 'role', 'action', 'message' or 'pattern', got {tok.value!r}",
            tok.span,
        )
        raise AssertionError("unreachable")

    def parse_role(self, leading: tuple[str, ...]) -> RoleDecl:
        start = self.advance()  # 'role'
        name = self.expect_ident("role name")
        semi = self.expect("SEMI", "';'")
        return RoleDecl(name.value, leading, self.take_trailing_comment(semi), start.span)

    # action name(P, Q) := provide(...) <- op(...), op(...);
    def parse_action(self, leading: tuple[str, ...]) -> ActionDecl:
        start = self.advance()  # 'action'
        name = self.expect_ident("action name")
        self.expect("LPAREN", "'('")
        params: list[str] = []
        param_seen: set[str] = set()
        if self.peek().kind != "RPAREN":
            while True:
                p = self.expect_ident("parameter name")
                self.check_var_name(p)
                if p.value in param_seen:
                    self.error(
                        f"duplicate parameter {p.value!r}", p.span, "E-DUP-VAR"
                    )
                param_seen.add(p.value)
                params.append(p.value)
                if not self.match("COMMA"):
                    break
        self.expect("RPAREN", "')'")
        self.expect("ASSIGN", "':='")
        kind_tok = self.expect_ident("'provide' or 'request'")
        try:
            kind = PrimitiveKind(kind_tok.value)
        except ValueError:
            self.fail(
                f"expected 'provide' or 'request', got {kind_tok.value!r}",
                kind_tok.span,
            )
        self.expect("LPAREN", "'('")
        args: list[Arg] = []
        declared: set[str] = set()
        while True:
            args.append(self.parse_arg(declared))
            if not self.match("COMMA"):
                break
        self.expect("RPAREN", "')'")
        operations: list[Operation] = []
        if self.match("LARROW"):
            while True:
                operations.append(self.parse_operation())
                if not self.match("COMMA"):
                    break
        semi = self.expect("SEMI", "';'")
        if set(params) != declared or len(param_seen) != len(params):
            missing = sorted(declared - set(params))
            extra = sorted(set(params) - declared)
            detail = []
            if missing:
                detail.append(f"missing {', '.join(missing)}")
            if extra:
                detail.append(f"undeclared {', '.join(extra)}")
            self.error(
                f"parameter list of {name.value!r} does not match declared "
                f"variables ({'; '.join(detail) or 'duplicates'})",
                name.span,
                "E-PARAMS",
            )
            raise _ParseAbort()
        action = ActionDef(
            name=name.value,
            params=tuple(params),
            primitive=PrimitiveSpec(kind, args[0], tuple(args[1:])),
            operations=tuple(operations),
        )
        return ActionDecl(action, leading, self.take_trailing_comment(semi), start.span)

    def check_var_name(self, tok: Token) -> None:
        if not tok.value[0].isupper():
            self.fail(
                f"variable names start with an uppercase letter, got {tok.value!r}",
                tok.span,
            )

    def parse_arg(self, declared: set[str]) -> Arg:
        if self.peek().kind == "LBRACKET" and self._bracket_is_group():
            return Arg(None, self.parse_group(declared))
        var = self.expect_ident("variable name")
        self.check_var_name(var)
        self.expect("COLON", "':'")
        typ = self.parse_nongroup_type()
        self.declare(var, declared)
        return Arg(var.value, typ)

    def _bracket_is_group(self) -> bool:
        """Disambiguate a group ``[X: t, ...]`` from a list type ``[base]``.

        At an argument position a ``[`` always opens a group (list-typed
        arguments are written ``V: [base]``), so this only confirms shape.
        """
        nxt = self.tokens[self.pos + 1]
        after = self.tokens[self.pos + 2]
        return nxt.kind == "ID" and after.kind == "COLON"

    def parse_group(self, declared: set[str]) -> GroupType:
        open_tok = self.expect("LBRACKET", "'['")
        members: list[tuple[str, BaseType | ListType]] = []
        while True:
            var = self.expect_ident("group member variable")
            self.check_var_name(var)
            self.expect("COLON", "':'")
            typ = self.parse_nongroup_type()
            self.declare(var, declared)
            members.append((var.value, typ))
            if not self.match("COMMA"):
                break
        self.expect("RBRACKET", "']'")
        if len(members) < 2:
            self.fail("a group needs at least two members", open_tok.span)
        return GroupType(tuple(members))

    def declare(self, var: Token, declared: set[str]) -> None:
        if var.value in declared:
            self.error(f"duplicate variable {var.value!r}", var.span, "E-DUP-VAR")
            raise _ParseAbort()
        declared.add(var.value)

    def parse_nongroup_type(self) -> BaseType | ListType:
        if self.match("LBRACKET"):
            element = self.parse_base_type()
            self.expect("RBRACKET", "']'")
            return ListType(element)
        return self.parse_base_type()

    def parse_base_type(self) -> BaseType:
        role_tok = self.expect_ident("a role ('input', 'output' or 'feedback')")
        try:
            role = Role(role_tok.value)
        except ValueError:
            self.fail(
                f"expected 'input', 'output' or 'feedback', got {role_tok.value!r}",
                role_tok.span,
            )
        subtypes: list[str] = []
        if self.match("DOT"):
            while True:
                sub = self.expect_ident("subtype name")
                if sub.value in subtypes:
                    self.fail(f"duplicate subtype {sub.value!r}", sub.span)
                subtypes.append(sub.value)
                if not self.match("PIPE"):
                    break
        return BaseType(role, tuple(subtypes))

    def parse_operation(self) -> Operation:
        op_tok = self.expect_ident("operation name")
        try:
            kind = OpKind(op_tok.value)
        except ValueError:
            self.fail(
                f"expected 'select', 'map', 'modify' or 'create', got {op_tok.value!r}",
                op_tok.span,
            )
        self.expect("LPAREN", "'('")
        args: list[str] = []
        while True:
            var = self.expect_ident("variable name")
            args.append(var.value)
            if not self.match("COMMA"):
                break
        self.expect("RPAREN", "')'")
        lo, hi = OP_ARITY[kind]
        if not lo <= len(args) <= hi:
            self.error(
                f"{kind.value} takes {lo} to {hi} arguments, got {len(args)}"
                if lo != hi
                else f"{kind.value} takes exactly {lo} argument"
                f"{'s' if lo != 1 else ''}, got {len(args)}",
                op_tok.span,
                "E-ARITY",
            )
            raise _ParseAbort()
        return Operation(kind, tuple(args))

    # message NAME := sender -> receiver : action(A, B) [mods];
    def parse_message(self, leading: tuple[str, ...]) -> MessageDecl:
        start = self.advance()  # 'message'
        name = self.expect_ident("message name")
        self.expect("ASSIGN", "':='")
        sender = self.expect_ident("sender role")
        self.expect("ARROW", "'->'")
        receiver = self.expect_ident("receiver role")
        self.expect("COLON", "':'")
        action = self.expect_ident("action name")
        self.expect("LPAREN", "'('")
        args: list[str] = []
        if self.peek().kind != "RPAREN":
            while True:
                var = self.expect_ident("argument variable")
                self.check_var_name(var)
                args.append(var.value)
                if not self.match("COMMA"):
                    break
        self.expect("RPAREN", "')'")
        modifiers: list[Modifier] = []
        if self.match("LBRACKET"):
            while True:
                modifiers.append(self.parse_modifier())
                if not self.match("SEMI"):
                    break
            self.expect("RBRACKET", "']'")
        semi = self.expect("SEMI", "';'")
        message = Message(
            name=name.value,
            sender=sender.value,
            receiver=receiver.value,
            action=action.value,
            args=tuple(args),
            modifiers=tuple(modifiers),
        )
        return MessageDecl(message, leading, self.take_trailing_comment(semi), start.span)

    def parse_modifier(self) -> Modifier:
        key = self.expect_ident("modifier key")
        if self.match("COLON"):
            value = self.expect_ident("modifier value")
            return Modifier(key.value, value.value, "var")
        self.expect("EQ", "':' or '='")
        value = self.expect("STRING", "a string value")
        return Modifier(key.value, value.value, "kv")

    # pattern NAME := [M1, M2] @ tag1, tag2;
    def parse_pattern(self, leading: tuple[str, ...]) -> PatternDecl:
        start = self.advance()  # 'pattern'
        name = self.expect_ident("pattern name")
        self.expect("ASSIGN", "':='")
        open_tok = self.expect("LBRACKET", "'['")
        messages: list[str] = []
        if self.peek().kind != "RBRACKET":
            while True:
                msg = self.expect_ident("message name")
                messages.append(msg.value)
                if not self.match("COMMA"):
                    break
        self.expect("RBRACKET", "']'")
        if not messages:
            self.error(
                f"pattern {name.value!r} has no messages",
                open_tok.span,
                "E-EMPTY-PATTERN",
            )
            raise _ParseAbort()
        tags: set[str] = set()
        if self.match("AT"):
            while True:
                tag = self.expect_ident("tag name")
                if tag.value not in TAGS:
                    self.error(
                        f"unknown tag {tag.value!r} (known: "
                        f"{', '.join(sorted(TAGS))})",
                        tag.span,
                        "E-TAG",
                    )
                    raise _ParseAbort()
                tags.add(tag.value)
                if not self.match("COMMA"):
                    break
        semi = self.expect("SEMI", "';'")
        pattern = Pattern(name.value, tuple(messages), frozenset(tags))
        return PatternDecl(pattern, leading, self.take_trailing_comment(semi), start.span)


def _decl_name(decl: Decl) -> str:
    if isinstance(decl, RoleDecl):
        return decl.name
    if isinstance(decl, ActionDecl):
        return decl.action.name
    if isinstance(decl, MessageDecl):
        return decl.message.name
    return decl.pattern.name


def _decl_span(decl: Decl) -> Span:
    return decl.span


def parse(text: str, path: str = "<input>") -> ParseResult:
    """Parse ``.hai`` source; on errors, ``file`` is ``None``.

    Recovery is per-declaration: a syntax error skips to the next ``;`` and
    parsing continues, so one bad declaration yields one diagnostic without
    hiding later ones.
    """
    try:
        tokens, comments = tokenize(text)
    except LexError as exc:
        diag = Diagnostic("error", "E-LEX", exc.message, path, exc.span)
        return ParseResult(None, (diag,))
    parser = _Parser(tokens, comments, path)
    source, diagnostics = parser.parse_file()
    return ParseResult(source, tuple(diagnostics))


def parse_type(text: str) -> TypeExpr:
    """Parse a standalone type expression (base, list, or named group).

    Used when reading types back from traces and exports.  Raises
    ``ValueError`` on malformed input.
    """
    tokens, _ = tokenize(text)
    parser = _Parser(tokens, [], "<type>")
    try:
        if parser.peek().kind == "LBRACKET" and parser._bracket_is_group():
            typ: TypeExpr = parser.parse_group(set())
        else:
            typ = parser.parse_nongroup_type()
    except _ParseAbort:
        raise ValueError(f"malformed type expression {text!r}") from None
    if parser.peek().kind != "EOF":
        raise ValueError(f"trailing input in type expression {text!r}")
    return typ


# ---------------------------------------------------------------------------
# Canonical printer
# ---------------------------------------------------------------------------


def print_type(typ: TypeExpr) -> str:
    return str(typ)


def _print_arg(arg: Arg) -> str:
    if arg.var is None:
        return str(arg.type)
    return f"{arg.var}: {arg.type}"


def print_action(action: ActionDef) -> str:
    params = ", ".join(action.params)
    prim = action.primitive
    args = ", ".join(_print_arg(a) for a in prim.args())
    text = f"action {action.name}({params}) := {prim.kind.value}({args})"
    if action.operations:
        ops = ", ".join(
            f"{op.kind.value}({', '.join(op.args)})" for op in action.operations
        )
        text += f" <- {ops}"
    return text + ";"


def _print_modifier(mod: Modifier) -> str:
    if mod.style == "var":
        return f"{mod.key}: {mod.value}"
    escaped = mod.value.replace("\\", "\\\\").replace('"', '\\"')
    return f'{mod.key}="{escaped}"'


def print_message(message: Message) -> str:
    args = ", ".join(message.args)
    text = (
        f"message {message.name} := {message.sender} -> {message.receiver} : "
        f"{message.action}({args})"
    )
    if message.modifiers:
        mods = "; ".join(_print_modifier(m) for m in message.modifiers)
        text += f" [{mods}]"
    return text + ";"


def print_pattern(pattern: Pattern) -> str:
    messages = ", ".join(pattern.messages)
    text = f"pattern {pattern.name} := [{messages}]"
    if pattern.tags:
        text += f" @ {', '.join(sorted(pattern.tags))}"
    return text + ";"


def print_decl(decl: Decl) -> str:
    if isinstance(decl, RoleDecl):
        body = f"role {decl.name};"
    elif isinstance(decl, ActionDecl):
        body = print_action(decl.action)
    elif isinstance(decl, MessageDecl):
        body = print_message(decl.message)
    else:
        body = print_pattern(decl.pattern)
    lines = [f"// {c}" if c else "//" for c in decl.leading_comments]
    if decl.trailing_comment is not None:
        body += f"  // {decl.trailing_comment}" if decl.trailing_comment else "  //"
    lines.append(body)
    return "\n".join(lines)


def print_source(source: SourceFile) -> str:
    """Emit the canonical text of a parsed file (ends with a newline)."""
    blocks = [print_decl(d) for d in source.decls]
    blocks.extend(f"// {c}" if c else "//" for c in source.trailing_comments)
    return "\n".join(blocks) + "\n" if blocks else ""
