"""Parser for the C subset used by competition submissions.

Covers functions, scalar/array declarations, if/else, while, for, do-while
(rewritten into body + while so the only loop kinds are While and For),
assignments including compound forms and ++/--, calls, return, break/continue,
the full C operator set, and integer/float/char/string literals.  ``#include``
lines become Ast preamble metadata; simple object-like ``#define`` macros are
inlined during tokenization.  Everything else (switch, goto, structs,
typedefs, pointer declarations or dereference) raises :class:`ParseError`.

Operator and literal labels are canonicalized so syntactically equal values
compare equal (``0x10`` and ``16`` produce the same Literal).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .nodes import Ast, Node, NodeKind, Span


class ParseError(Exception):
    """Raised when the input is not in the supported grammar."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} (line {line}, col {col})")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True, slots=True)
class Token:
    type: str  # id, kw, int, float, char, str, punct, eof
    value: str
    line: int
    col: int


KEYWORDS = {
    "if", "else", "while", "for", "do", "return", "break", "continue",
    "int", "long", "short", "char", "float", "double", "void",
    "unsigned", "signed", "const",
}

REJECTED_KEYWORDS = {
    "switch", "case", "default", "goto", "struct", "union", "enum",
    "typedef", "sizeof", "static", "extern", "register", "volatile", "auto",
}

TYPE_WORDS = {
    "void", "char", "short", "int", "long", "float", "double",
    "unsigned", "signed",
}

_PUNCT = [
    ">>=", "<<=", "...",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<", ">>", "->",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "~", "&", "|", "^", "?", ":",
    ";", ",", "(", ")", "{", "}", "[", "]", ".",
]

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>//[^\n]*|/\*.*?\*/)
    | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?)
    | (?P<int>0[xX][0-9a-fA-F]+[uUlL]*|\d+[uUlL]*)
    | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<char>'(?:\\.|[^'\\])+')
    | (?P<str>"(?:\\.|[^"\\])*")
    | (?P<punct>""" + "|".join(re.escape(p) for p in _PUNCT) + r""")
    """,
    re.VERBOSE | re.DOTALL,
)

_INT_SUFFIX_RE = re.compile(r"[uUlL]*$")
_FLOAT_SUFFIX_RE = re.compile(r"[fFlL]?$")

ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="}

# Binary operator precedence, loosest first; comma, assignment and ?: are
# handled by dedicated routines.
_BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["|"],
    ["^"],
    ["&"],
    ["==", "!="],
    ["<", "<=", ">", ">="],
    ["<<", ">>"],
    ["+", "-"],
    ["*", "/", "%"],
]

_LIBRARY_TYPE_NAMES = {"size_t"}  # tolerated as plain scalar types


def canonical_int(text: str, line: int = 0, col: int = 0) -> str:
    suffix = _INT_SUFFIX_RE.search(text).group()
    body = text[: len(text) - len(suffix)]
    try:
        if body[:2].lower() == "0x":
            value = int(body, 16)
        elif body.startswith("0") and len(body) > 1:
            value = int(body, 8)
        else:
            value = int(body, 10)
    except ValueError:
        raise ParseError(f"bad integer literal {text!r}", line, col) from None
    up = suffix.upper()
    norm = ("U" if "U" in up else "") + "L" * up.count("L")
    return str(value) + norm


def canonical_float(text: str) -> str:
    suffix = _FLOAT_SUFFIX_RE.search(text).group()
    body = text[: len(text) - len(suffix)]
    return repr(float(body)) + suffix.upper()


def canonical_type(words: list[str]) -> str:
    """Normalize a type-word sequence: drop a redundant trailing ``int``."""
    if len(words) > 1 and words[-1] == "int" and words[0] != "int":
        words = words[:-1]
    if words == ["signed"]:
        words = ["int"]
    return " ".join(words)


def _line_col(src: str, pos: int) -> tuple[int, int]:
    line = src.count("\n", 0, pos) + 1
    nl = src.rfind("\n", 0, pos)
    return line, pos - nl


def tokenize(source: str) -> tuple[list[Token], tuple[str, ...]]:
    """Token stream plus verbatim ``#include`` preamble lines.

    Object-like ``#define`` macros are collected and substituted into the
    stream; function-like macros and other directives are rejected.
    """
    includes: list[str] = []
    defines: dict[str, list[Token]] = {}
    kept_lines: list[str] = []
    # Directives are line-oriented; blank them out before the regex scan so
    # line numbering stays stable.
    for raw in source.split("\n"):
        stripped = raw.strip()
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("include"):
                includes.append(stripped)
                kept_lines.append("")
                continue
            if body.startswith("define"):
                kept_lines.append("")
                rest = body[len("define"):].strip()
                m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)(\(?)", rest)
                if not m or m.group(2) == "(":
                    raise ParseError(
                        "only object-like #define is supported", len(kept_lines), 1
                    )
                name = m.group(1)
                body_tokens = _scan(rest[m.end():], len(kept_lines))
                defines[name] = [t for t in body_tokens if t.type != "eof"]
                continue
            raise ParseError(
                f"unsupported preprocessor directive {stripped.split()[0]!r}",
                len(kept_lines) + 1, 1,
            )
        kept_lines.append(raw)
    tokens = _scan("\n".join(kept_lines), 0)
    if defines:
        tokens = _expand_defines(tokens, defines)
    return tokens, tuple(includes)


def _scan(text: str, line_offset: int) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            line, col = _line_col(text, pos)
            raise ParseError(
                f"unexpected character {text[pos]!r}", line + line_offset, col
            )
        pos = m.end()
        group = m.lastgroup
        if group in ("ws", "comment"):
            continue
        line, col = _line_col(text, m.start())
        value = m.group()
        if group == "id":
            if value in REJECTED_KEYWORDS:
                raise ParseError(
                    f"unsupported construct {value!r}", line + line_offset, col
                )
            group = "kw" if value in KEYWORDS else "id"
        tokens.append(Token(group, value, line + line_offset, col))
    tokens.append(Token("eof", "", line_offset + text.count("\n") + 1, 1))
    return tokens


def _expand_defines(tokens: list[Token], defines: dict[str, list[Token]]) -> list[Token]:
    out: list[Token] = []
    for tok in tokens:
        if tok.type == "id" and tok.value in defines:
            for sub in _expand_one(tok.value, defines, {tok.value}):
                out.append(Token(sub.type, sub.value, tok.line, tok.col))
        else:
            out.append(tok)
    return out


def _expand_one(name: str, defines: dict[str, list[Token]], seen: set[str]) -> list[Token]:
    result: list[Token] = []
    for tok in defines[name]:
        if tok.type == "id" and tok.value in defines and tok.value not in seen:
            result.extend(_expand_one(tok.value, defines, seen | {tok.value}))
        else:
            result.append(tok)
    return result


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers -------------------------------------------------
    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "eof":
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok.type in ("punct", "kw") and tok.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.next()
            return True
        return False

    def expect(self, value: str) -> Token:
        tok = self.peek()
        if not self.at(value):
            raise ParseError(f"expected {value!r}, found {tok.value!r}", tok.line, tok.col)
        return self.next()

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def span(self) -> Span:
        tok = self.peek()
        return Span(tok.line, tok.col)

    # -- types ----------------------------------------------------------
    def at_type(self) -> bool:
        tok = self.peek()
        if tok.type == "kw" and (tok.value in TYPE_WORDS or tok.value == "const"):
            return True
        return tok.type == "id" and tok.value in _LIBRARY_TYPE_NAMES

    def parse_type(self) -> str:
        words: list[str] = []
        while True:
            tok = self.peek()
            if tok.type == "kw" and tok.value == "const":
                self.next()  # qualifier dropped from the canonical type
                continue
            if tok.type == "kw" and tok.value in TYPE_WORDS:
                words.append(self.next().value)
                continue
            if tok.type == "id" and tok.value in _LIBRARY_TYPE_NAMES and not words:
                words.append(self.next().value)
            break
        if not words:
            raise self.fail("expected a type")
        if self.at("*"):
            tok = self.peek()
            raise ParseError("pointer types are not supported", tok.line, tok.col)
        return canonical_type(words)

    # -- translation unit ------------------------------------------------
    def parse_unit(self) -> Node:
        items: list[Node] = []
        while self.peek().type != "eof":
            items.extend(self.parse_external())
        if not items:
            raise self.fail("empty program")
        if len(items) == 1:
            return items[0]
        return Node(NodeKind.BLOCK, "", tuple(items))

    def parse_external(self) -> list[Node]:
        span = self.span()
        ctype = self.parse_type()
        name_tok = self.peek()
        if name_tok.type != "id":
            raise self.fail("expected a name")
        self.next()
        if self.at("("):
            return [self.parse_funcdef(ctype, name_tok, span)]
        return self.parse_declarators(ctype, name_tok, span)

    def parse_funcdef(self, ctype: str, name_tok: Token, span: Span) -> Node:
        self.expect("(")
        params: list[Node] = []
        if not self.at(")"):
            if self.at("void") and self.peek(1).value == ")":
                self.next()
            else:
                while True:
                    params.append(self.parse_param())
                    if not self.accept(","):
                        break
        self.expect(")")
        body = self.parse_block()
        label = f"{ctype} {name_tok.value}"
        return Node(NodeKind.FUNC_DEF, label, tuple(params) + (body,), span)

    def parse_param(self) -> Node:
        span = self.span()
        ctype = self.parse_type()
        tok = self.peek()
        if tok.type != "id":
            raise self.fail("expected a parameter name")
        self.next()
        ident = Node(NodeKind.IDENTIFIER, tok.value, (), Span(tok.line, tok.col))
        if self.accept("["):
            self.expect("]")
            return Node(NodeKind.DECL, ctype + "[]", (ident,), span)
        return Node(NodeKind.DECL, ctype, (ident,), span)

    def parse_declarators(self, ctype: str, first: Token, span: Span) -> list[Node]:
        """One or more comma-separated declarators; each becomes its own Decl."""
        decls: list[Node] = []
        tok = first
        while True:
            decls.append(self.parse_one_declarator(ctype, tok, span))
            if self.accept(","):
                tok = self.peek()
                if tok.type != "id":
                    raise self.fail("expected a name")
                self.next()
                span = Span(tok.line, tok.col)
                continue
            break
        self.expect(";")
        return decls

    def parse_one_declarator(self, ctype: str, name_tok: Token, span: Span) -> Node:
        ident = Node(NodeKind.IDENTIFIER, name_tok.value, (), Span(name_tok.line, name_tok.col))
        if self.accept("["):
            if self.at("]"):
                size: Node = Node(NodeKind.EMPTY, "", (), self.span())
            else:
                size = self.parse_expr(no_comma=True)
            self.expect("]")
            if self.at("["):
                raise self.fail("multidimensional arrays are not supported")
            if self.at("="):
                raise self.fail("array initializers are not supported")
            return Node(NodeKind.DECL, ctype + "[]", (ident, size), span)
        if self.accept("="):
            if self.at("{"):
                raise self.fail("brace initializers are not supported")
            init = self.parse_expr(no_comma=True)
            return Node(NodeKind.DECL, ctype, (ident, init), span)
        return Node(NodeKind.DECL, ctype, (ident,), span)

    # -- statements --------------------------------------------------------
    def parse_block(self) -> Node:
        span = self.span()
        self.expect("{")
        stmts: list[Node] = []
        while not self.at("}"):
            if self.peek().type == "eof":
                raise self.fail("unterminated block")
            stmts.extend(self.parse_statement())
        self.expect("}")
        return Node(NodeKind.BLOCK, "", tuple(stmts), span)

    def parse_body(self) -> Node:
        """A statement in body position, normalized to a Block."""
        span = self.span()
        stmts = self.parse_statement()
        if len(stmts) == 1 and stmts[0].kind is NodeKind.BLOCK:
            return stmts[0]
        return Node(NodeKind.BLOCK, "", tuple(stmts), span)

    def parse_statement(self) -> list[Node]:
        span = self.span()
        tok = self.peek()
        if self.at("{"):
            return [self.parse_block()]
        if self.accept(";"):
            return []  # empty statements carry no tree content
        if tok.type == "kw":
            if tok.value == "if":
                return [self.parse_if()]
            if tok.value == "while":
                return [self.parse_while()]
            if tok.value == "for":
                return [self.parse_for()]
            if tok.value == "do":
                return self.parse_do_while()
            if tok.value == "return":
                self.next()
                if self.accept(";"):
                    return [Node(NodeKind.RETURN, "", (), span)]
                expr = self.parse_expr()
                self.expect(";")
                return [Node(NodeKind.RETURN, "", (expr,), span)]
            if tok.value == "break":
                self.next()
                self.expect(";")
                return [Node(NodeKind.BREAK, "", (), span)]
            if tok.value == "continue":
                self.next()
                self.expect(";")
                return [Node(NodeKind.CONTINUE, "", (), span)]
        if self.at_type():
            ctype = self.parse_type()
            name_tok = self.peek()
            if name_tok.type != "id":
                raise self.fail("expected a name")
            self.next()
            return self.parse_declarators(ctype, name_tok, span)
        expr = self.parse_expr()
        self.expect(";")
        return [expr]

    def parse_if(self) -> Node:
        span = self.span()
        self.expect("if")
        self.expect("(")
        guard = self.parse_expr()
        self.expect(")")
        then = self.parse_body()
        if self.accept("else"):
            other = self.parse_body()
            return Node(NodeKind.IF, "", (guard, then, other), span)
        return Node(NodeKind.IF, "", (guard, then), span)

    def parse_while(self) -> Node:
        span = self.span()
        self.expect("while")
        self.expect("(")
        guard = self.parse_expr()
        self.expect(")")
        body = self.parse_body()
        return Node(NodeKind.WHILE, "", (guard, body), span)

    def parse_for(self) -> Node:
        span = self.span()
        self.expect("for")
        self.expect("(")
        if self.accept(";"):
            init: Node = Node(NodeKind.EMPTY, "", (), span)
        elif self.at_type():
            dspan = self.span()
            ctype = self.parse_type()
            name_tok = self.peek()
            if name_tok.type != "id":
                raise self.fail("expected a name")
            self.next()
            decls = self.parse_declarators(ctype, name_tok, dspan)
            if len(decls) != 1:
                raise ParseError(
                    "for-initializer may declare a single variable",
                    dspan.line, dspan.col,
                )
            init = decls[0]
        else:
            init = self.parse_expr()
            self.expect(";")
        if self.at(";"):
            cond: Node = Node(NodeKind.EMPTY, "", (), self.span())
        else:
            cond = self.parse_expr()
        self.expect(";")
        if self.at(")"):
            step: Node = Node(NodeKind.EMPTY, "", (), self.span())
        else:
            step = self.parse_expr()
        self.expect(")")
        body = self.parse_body()
        return Node(NodeKind.FOR, "", (init, cond, step, body), span)

    def parse_do_while(self) -> list[Node]:
        """``do B while (c);`` rewritten as the statements of B then the loop."""
        span = self.span()
        self.expect("do")
        body = self.parse_body()
        self.expect("while")
        self.expect("(")
        guard = self.parse_expr()
        self.expect(")")
        self.expect(";")
        loop = Node(NodeKind.WHILE, "", (guard, body), span)
        return list(body.children) + [loop]

    # -- expressions ---------------------------------------------------
    # Precedence, loosest to tightest: comma, assignment, ?:, the binary
    # ladder, unary, postfix, primary.

    def parse_expr(self, no_comma: bool = False) -> Node:
        left = self.parse_assign()
        if no_comma:
            return left
        while self.at(","):
            span = self.span()
            self.next()
            right = self.parse_assign()
            left = Node(NodeKind.BIN_OP, ",", (left, right), span)
        return left

    def parse_assign(self) -> Node:
        left = self.parse_conditional()
        tok = self.peek()
        if tok.type == "punct" and tok.value in ASSIGN_OPS:
            if not self._assignable(left):
                raise ParseError(
                    "assignment target must be a variable or array element",
                    tok.line, tok.col,
                )
            self.next()
            right = self.parse_assign()
            return Node(NodeKind.ASSIGN, tok.value, (left, right), Span(tok.line, tok.col))
        return left

    @staticmethod
    def _assignable(node: Node) -> bool:
        return node.kind is NodeKind.IDENTIFIER or (
            node.kind is NodeKind.BIN_OP and node.label == "[]"
        )

    def parse_conditional(self) -> Node:
        cond = self.parse_binary(0)
        if self.at("?"):
            span = self.span()
            self.next()
            then = self.parse_expr(no_comma=True)
            colon_span = self.span()
            self.expect(":")
            other = self.parse_assign()
            arms = Node(NodeKind.BIN_OP, ":", (then, other), colon_span)
            return Node(NodeKind.BIN_OP, "?", (cond, arms), span)
        return cond

    def parse_binary(self, level: int) -> Node:
        if level >= len(_BINARY_LEVELS):
            return self.parse_unary()
        ops = _BINARY_LEVELS[level]
        left = self.parse_binary(level + 1)
        while True:
            tok = self.peek()
            if tok.type == "punct" and tok.value in ops:
                self.next()
                right = self.parse_binary(level + 1)
                left = Node(NodeKind.BIN_OP, tok.value, (left, right), Span(tok.line, tok.col))
            else:
                return left

    def parse_unary(self) -> Node:
        tok = self.peek()
        if tok.type == "punct":
            if tok.value in ("-", "+", "!", "~", "&", "++", "--"):
                self.next()
                operand = self.parse_unary()
                return Node(NodeKind.UN_OP, tok.value, (operand,), Span(tok.line, tok.col))
            if tok.value == "*":
                raise ParseError("pointer dereference is not supported", tok.line, tok.col)
            if tok.value == "(" and self._cast_ahead():
                self.next()
                ctype = self.parse_type()
                self.expect(")")
                operand = self.parse_unary()
                return Node(NodeKind.UN_OP, f"({ctype})", (operand,), Span(tok.line, tok.col))
        return self.parse_postfix()

    def _cast_ahead(self) -> bool:
        tok = self.peek(1)
        if tok.type == "kw" and (tok.value in TYPE_WORDS or tok.value == "const"):
            return True
        return tok.type == "id" and tok.value in _LIBRARY_TYPE_NAMES and self.peek(2).value == ")"

    def parse_postfix(self) -> Node:
        node = self.parse_primary()
        while True:
            tok = self.peek()
            if self.at("("):
                self.next()
                args: list[Node] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr(no_comma=True))
                        if not self.accept(","):
                            break
                self.expect(")")
                node = Node(NodeKind.CALL, "", (node, *args), Span(tok.line, tok.col))
            elif self.at("["):
                self.next()
                index = self.parse_expr()
                self.expect("]")
                node = Node(NodeKind.BIN_OP, "[]", (node, index), Span(tok.line, tok.col))
            elif self.at("++") or self.at("--"):
                self.next()
                node = Node(NodeKind.UN_OP, "p" + tok.value, (node,), Span(tok.line, tok.col))
            else:
                return node

    def parse_primary(self) -> Node:
        tok = self.peek()
        span = Span(tok.line, tok.col)
        if tok.type == "int":
            self.next()
            return Node(NodeKind.LITERAL, canonical_int(tok.value, tok.line, tok.col), (), span)
        if tok.type == "float":
            self.next()
            return Node(NodeKind.LITERAL, canonical_float(tok.value), (), span)
        if tok.type in ("char", "str"):
            self.next()
            return Node(NodeKind.LITERAL, tok.value, (), span)
        if tok.type == "id":
            self.next()
            return Node(NodeKind.IDENTIFIER, tok.value, (), span)
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise self.fail(f"expected an expression, found {tok.value!r}")


def parse(source: str) -> Ast:
    """Parse C source into an Ast.

    Raises :class:`ParseError` for any construct outside the supported
    grammar.  Comments and insignificant whitespace are discarded.
    """
    tokens, includes = tokenize(source)
    parser = _Parser(tokens)
    root = parser.parse_unit()
    tok = parser.peek()
    if tok.type != "eof":
        raise ParseError(f"unexpected trailing input {tok.value!r}", tok.line, tok.col)
    digest = hashlib.sha256(source.encode("utf-8")).hexdigest()
    return Ast(root, includes, digest)
