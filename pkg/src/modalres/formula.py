"""Multimodal formulae: abstract syntax, parsing, and printing.

Formulae are built over a finite agent set {1..n}.  The concrete grammar
(precedence from loosest to tightest):

    formula := iff
    iff     := imp ('<->' imp)*          left associative
    imp     := or ('->' imp)?            right associative
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | '[' INT ']' unary | '<' INT '>' unary | atom
    atom    := 'true' | 'false' | IDENT | '(' formula ')'

Whitespace is insignificant and '#' starts a line comment.  Identifiers
match [a-z][a-z0-9_]*; names beginning with '_' are reserved for symbols
generated by the normal-form translation.
"""

from __future__ import annotations

from dataclasses import dataclass


# ============================================================
# Abstract syntax
# ============================================================

class Formula:
    """Base class for formula AST nodes.  All nodes are immutable."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True, slots=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Start(Formula):
    """Nullary connective true exactly at the distinguished world."""


@dataclass(frozen=True, slots=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    agent: int
    body: Formula


@dataclass(frozen=True, slots=True)
class Dia(Formula):
    agent: int
    body: Formula


TRUE = TrueConst()
FALSE = FalseConst()
START = Start()


def prop_symbols(f: Formula) -> set[str]:
    """All propositional symbols occurring in f."""
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Prop):
            out.add(g.name)
        elif isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (And, Or, Implies, Iff)):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, (Box, Dia)):
            stack.append(g.body)
    return out


def agents_of(f: Formula) -> set[int]:
    """All agent indices occurring in f."""
    out: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Box, Dia)):
            out.add(g.agent)
            stack.append(g.body)
        elif isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (And, Or, Implies, Iff)):
            stack.append(g.left)
            stack.append(g.right)
    return out


# ============================================================
# Literals
# ============================================================

@dataclass(frozen=True, slots=True)
class Lit:
    """A propositional symbol or its negation."""

    symbol: str
    positive: bool = True

    def render(self) -> str:
        return self.symbol if self.positive else "~" + self.symbol

    def __repr__(self) -> str:
        return f"Lit({self.render()!r})"


def complement(l: Lit) -> Lit:
    """Flip the sign of a literal; the symbol is preserved."""
    return Lit(l.symbol, not l.positive)


def lit_key(l: Lit) -> tuple[str, bool]:
    """Deterministic ordering key: symbol first, positive before negative."""
    return (l.symbol, not l.positive)


def lit_to_formula(l: Lit) -> Formula:
    p = Prop(l.symbol)
    return p if l.positive else Not(p)


# ============================================================
# Parsing
# ============================================================

class ParseError(ValueError):
    """Syntax or scoping error, with 1-based line/column of the offence."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_PUNCT = ("<->", "->", "(", ")", "[", "]", "<", ">", "~", "&", "|")


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    """Produce (kind, value, line, col) tokens; kind is one of
    'ident', 'int', 'punct', 'eof'."""
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        matched = False
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(("punct", p, line, col))
                i += len(p)
                col += len(p)
                matched = True
                break
        if matched:
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() and c.islower() or c == "_":
            j = i
            while j < n and (text[j].isalnum() and not text[j].isupper() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens, agent_count, allow_start, allow_reserved):
        self.tokens = tokens
        self.pos = 0
        self.agent_count = agent_count
        self.allow_start = allow_start
        self.allow_reserved = allow_reserved

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        _, _, line, col = self.peek()
        return ParseError(message, line, col)

    def expect(self, value: str):
        kind, val, _, _ = self.peek()
        if kind != "punct" or val != value:
            raise self.error(f"expected {value!r}, found {val or 'end of input'!r}")
        return self.next()

    def formula(self) -> Formula:
        f = self.imp()
        while self.peek()[:2] == ("punct", "<->"):
            self.next()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.or_()
        if self.peek()[:2] == ("punct", "->"):
            self.next()
            return Implies(f, self.imp())
        return f

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek()[:2] == ("punct", "|"):
            self.next()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek()[:2] == ("punct", "&"):
            self.next()
            f = And(f, self.unary())
        return f

    def agent_index(self) -> int:
        kind, val, line, col = self.peek()
        if kind != "int":
            raise self.error("expected an agent index")
        self.next()
        a = int(val)
        if a < 1:
            raise ParseError("agent index must be at least 1", line, col)
        if self.agent_count is not None and a > self.agent_count:
            raise ParseError(
                f"agent index {a} out of range 1..{self.agent_count}", line, col)
        return a

    def unary(self) -> Formula:
        kind, val, line, col = self.peek()
        if kind == "punct" and val == "~":
            self.next()
            return Not(self.unary())
        if kind == "punct" and val == "[":
            self.next()
            a = self.agent_index()
            self.expect("]")
            return Box(a, self.unary())
        if kind == "punct" and val == "<":
            self.next()
            a = self.agent_index()
            self.expect(">")
            return Dia(a, self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, val, line, col = self.peek()
        if kind == "punct" and val == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "ident":
            self.next()
            if val == "true":
                return TRUE
            if val == "false":
                return FALSE
            if val == "start":
                if not self.allow_start:
                    raise ParseError(
                        "'start' is reserved for the normal form layer", line, col)
                return START
            if val.startswith("_") and not self.allow_reserved:
                raise ParseError(
                    f"identifier {val!r} uses the reserved '_' prefix", line, col)
            return Prop(val)
        raise self.error(f"expected a formula, found {val or 'end of input'!r}")


def parse(text: str, agent_count: int | None = None, *,
          allow_start: bool = False, allow_reserved: bool = False) -> Formula:
    """Parse a formula.  agent_count bounds the agent indices accepted;
    None accepts any positive index.  allow_start admits the 'start'
    keyword (normally rejected in user input); allow_reserved admits
    '_'-prefixed identifiers (used when re-reading generated output)."""
    parser = _Parser(_tokenize(text), agent_count, allow_start, allow_reserved)
    f = parser.formula()
    kind, val, line, col = parser.peek()
    if kind != "eof":
        raise ParseError(f"unexpected trailing input {val!r}", line, col)
    return f


# ============================================================
# Printing
# ============================================================

# Precedence levels, loosest first; unary and atoms bind tightest.
_LEVEL_IFF, _LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY = 1, 2, 3, 4, 5


def _level(f: Formula) -> int:
    if isinstance(f, Iff):
        return _LEVEL_IFF
    if isinstance(f, Implies):
        return _LEVEL_IMP
    if isinstance(f, Or):
        return _LEVEL_OR
    if isinstance(f, And):
        return _LEVEL_AND
    return _LEVEL_UNARY


def _wrap(f: Formula, minimum: int) -> str:
    text = render(f)
    return "(" + text + ")" if _level(f) < minimum else text


def render(f: Formula) -> str:
    """Render with minimal parentheses; parse(render(f)) == f."""
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Start):
        return "start"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Not):
        return "~" + _wrap(f.body, _LEVEL_UNARY)
    if isinstance(f, Box):
        return f"[{f.agent}]" + _wrap(f.body, _LEVEL_UNARY)
    if isinstance(f, Dia):
        return f"<{f.agent}>" + _wrap(f.body, _LEVEL_UNARY)
    if isinstance(f, And):
        # left associative: a & b & c parses as (a & b) & c
        return _wrap(f.left, _LEVEL_AND) + " & " + _wrap(f.right, _LEVEL_AND + 1)
    if isinstance(f, Or):
        return _wrap(f.left, _LEVEL_OR) + " | " + _wrap(f.right, _LEVEL_OR + 1)
    if isinstance(f, Implies):
        # right associative
        return _wrap(f.left, _LEVEL_IMP + 1) + " -> " + _wrap(f.right, _LEVEL_IMP)
    if isinstance(f, Iff):
        return _wrap(f.left, _LEVEL_IFF) + " <-> " + _wrap(f.right, _LEVEL_IFF + 1)
    raise TypeError(f"not a formula: {f!r}")
