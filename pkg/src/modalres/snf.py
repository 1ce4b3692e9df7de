"""Separated normal form: clause forms, translation, definition clauses.

Every clause is implicitly prefixed by the universal operator ("holds here
and at every reachable world"); the operator is never materialized.  The
four clause forms are:

    initial          start -> l1 | ... | lr
    literal          true  -> l1 | ... | lr
    positive modal   l -> [a] l'
    negative modal   l -> ~[a] l'

The text format above (one clause per line, '~' for negation, 'false' for
the empty disjunction) is used both for emitting clause sets and as direct
prover input.

Generated symbols are '_'-prefixed: '_t0', '_t1', ... for renaming
surrogates and '_w<agent>_<p|n><symbol>' for definition symbols, so they
can never collide with user identifiers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .formula import (And, Box, Dia, FalseConst, Formula, Iff, Implies, Lit,
                      Not, Or, Prop, Start, TrueConst, complement, lit_key)


# ============================================================
# Clauses
# ============================================================

class ClauseKind(enum.Enum):
    INITIAL = "initial"
    LITERAL = "literal"
    POS_MODAL = "positive-modal"
    NEG_MODAL = "negative-modal"


@dataclass(frozen=True, slots=True)
class Clause:
    """One SNF clause.  disjuncts is set for the two disjunction kinds,
    lhs/agent/rhs for the two modal kinds."""

    kind: ClauseKind
    disjuncts: frozenset[Lit] | None = None
    lhs: Lit | None = None
    agent: int | None = None
    rhs: Lit | None = None

    def is_tautology(self) -> bool:
        if self.disjuncts is None:
            return False
        return any(complement(l) in self.disjuncts for l in self.disjuncts)

    def is_contradiction(self) -> bool:
        return self.disjuncts is not None and not self.disjuncts

    def is_modal(self) -> bool:
        return self.disjuncts is None

    def size(self) -> int:
        """Literal count, used for clause selection order."""
        return 2 if self.disjuncts is None else len(self.disjuncts)

    def literals(self) -> frozenset[Lit]:
        if self.disjuncts is not None:
            return self.disjuncts
        return frozenset((self.lhs, self.rhs))

    def symbols(self) -> set[str]:
        return {l.symbol for l in self.literals()}

    def sorted_disjuncts(self) -> list[Lit]:
        return sorted(self.disjuncts, key=lit_key)

    def render(self) -> str:
        if self.kind is ClauseKind.INITIAL or self.kind is ClauseKind.LITERAL:
            head = "start" if self.kind is ClauseKind.INITIAL else "true"
            if not self.disjuncts:
                return f"{head} -> false"
            body = " | ".join(l.render() for l in self.sorted_disjuncts())
            return f"{head} -> {body}"
        box = f"[{self.agent}]" if self.kind is ClauseKind.POS_MODAL else f"~[{self.agent}]"
        return f"{self.lhs.render()} -> {box} {self.rhs.render()}"

    def __repr__(self) -> str:
        return f"Clause({self.render()!r})"


def initial_clause(lits) -> Clause:
    return Clause(ClauseKind.INITIAL, disjuncts=frozenset(lits))


def literal_clause(lits) -> Clause:
    return Clause(ClauseKind.LITERAL, disjuncts=frozenset(lits))


def pos_modal(lhs: Lit, agent: int, rhs: Lit) -> Clause:
    return Clause(ClauseKind.POS_MODAL, lhs=lhs, agent=agent, rhs=rhs)


def neg_modal(lhs: Lit, agent: int, rhs: Lit) -> Clause:
    return Clause(ClauseKind.NEG_MODAL, lhs=lhs, agent=agent, rhs=rhs)


# ============================================================
# Clause sets with justifications
# ============================================================

ORIGIN_INPUT = "input"
ORIGIN_DEFINITION = "def"


@dataclass(slots=True)
class ClauseRecord:
    clause: Clause
    rule: str                     # ORIGIN_* or an inference rule name
    premises: tuple[int, ...]
    active: bool = True


class ClauseSet:
    """Indexed clause sequence with per-clause justification.

    Indices are stable: clauses are never removed, only flagged inactive,
    so proofs can always be extracted.  Tautologies are never stored and
    duplicate clauses keep their first justification.
    """

    def __init__(self):
        self.records: list[ClauseRecord] = []
        self._index: dict[Clause, int] = {}

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def add(self, clause: Clause, rule: str = ORIGIN_INPUT,
            premises: tuple[int, ...] = ()) -> int | None:
        """Record a clause; returns its index, the existing index for a
        duplicate, or None for a tautology (never stored)."""
        if clause.is_tautology():
            return None
        existing = self._index.get(clause)
        if existing is not None:
            return existing
        idx = len(self.records)
        self.records.append(ClauseRecord(clause, rule, premises))
        self._index[clause] = idx
        return idx

    def extend(self, other: "ClauseSet") -> None:
        for rec in other.records:
            self.add(rec.clause, rec.rule, rec.premises)

    def contains(self, clause: Clause) -> bool:
        return clause in self._index

    def clauses(self) -> list[Clause]:
        return [rec.clause for rec in self.records]

    def active_clauses(self) -> list[Clause]:
        return [rec.clause for rec in self.records if rec.active]

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for rec in self.records:
            out |= rec.clause.symbols()
        return out

    def agents(self) -> set[int]:
        return {rec.clause.agent for rec in self.records
                if rec.clause.agent is not None}

    def find_contradiction(self) -> int | None:
        for i, rec in enumerate(self.records):
            if rec.clause.is_contradiction():
                return i
        return None

    def render(self) -> str:
        return "\n".join(rec.clause.render() for rec in self.records)


# ============================================================
# Clause text format
# ============================================================

class ClauseFormatError(ValueError):
    pass


def _parse_lit(text: str) -> Lit:
    text = text.strip()
    positive = True
    if text.startswith("~"):
        positive = False
        text = text[1:].strip()
    if not text or not all(c.isalnum() and not c.isupper() or c == "_" for c in text):
        raise ClauseFormatError(f"bad literal {text!r}")
    if text[0].isdigit():
        raise ClauseFormatError(f"bad literal {text!r}")
    return Lit(text, positive)


def parse_clause(line: str) -> Clause:
    """Parse one clause in the text format."""
    if "->" not in line:
        raise ClauseFormatError(f"missing '->' in clause {line!r}")
    head, _, body = line.partition("->")
    head = head.strip()
    body = body.strip()
    if head in ("start", "true"):
        if body == "false":
            lits: list[Lit] = []
        else:
            lits = [_parse_lit(part) for part in body.split("|")]
        return initial_clause(lits) if head == "start" else literal_clause(lits)
    lhs = _parse_lit(head)
    negated = body.startswith("~")
    if negated:
        body = body[1:].strip()
    if not body.startswith("["):
        raise ClauseFormatError(f"expected '[agent]' in clause {line!r}")
    close = body.index("]") if "]" in body else -1
    if close < 0:
        raise ClauseFormatError(f"unterminated agent index in {line!r}")
    agent_text = body[1:close].strip()
    if not agent_text.isdigit() or int(agent_text) < 1:
        raise ClauseFormatError(f"bad agent index {agent_text!r}")
    rhs = _parse_lit(body[close + 1:])
    make = neg_modal if negated else pos_modal
    return make(lhs, int(agent_text), rhs)


def parse_clause_lines(text: str) -> list[Clause]:
    """Parse a clause-set file: one clause per line, '#' comments."""
    clauses = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            clauses.append(parse_clause(line))
    return clauses


# ============================================================
# Fresh symbols
# ============================================================

RESERVED_PREFIX = "_"
SURROGATE_PREFIX = "_t"
DEFINITION_PREFIX = "_w"
RENAME_PREFIX = "_u"


class SymbolSource:
    """Deterministic source of fresh '_'-prefixed symbols."""

    def __init__(self, prefix: str = SURROGATE_PREFIX):
        self.prefix = prefix
        self.counter = 0

    def fresh(self) -> Lit:
        sym = f"{self.prefix}{self.counter}"
        self.counter += 1
        return Lit(sym, True)


def is_definition_symbol(symbol: str) -> bool:
    return symbol.startswith(DEFINITION_PREFIX)


def definition_symbol(agent: int, lit: Lit) -> Lit:
    """The definition symbol standing for <a>lit; deterministic encoding."""
    sign = "p" if lit.positive else "n"
    return Lit(f"{DEFINITION_PREFIX}{agent}_{sign}{lit.symbol}", True)


# ============================================================
# Translation to SNF
# ============================================================

def _rewrite(f: Formula) -> Formula:
    """Eliminate Iff, Implies and Dia; fold constants one level at a time.
    Negations are not pushed here; the clause transformer pushes them only
    where needed."""
    if isinstance(f, (TrueConst, FalseConst, Start, Prop)):
        return f
    if isinstance(f, Not):
        body = _rewrite(f.body)
        if isinstance(body, TrueConst):
            return FalseConst()
        if isinstance(body, FalseConst):
            return TrueConst()
        if isinstance(body, Not):
            return body.body
        return Not(body)
    if isinstance(f, Iff):
        return _rewrite(And(Implies(f.left, f.right), Implies(f.right, f.left)))
    if isinstance(f, Implies):
        return _rewrite(Or(Not(f.left), f.right))
    if isinstance(f, Dia):
        return _rewrite(Not(Box(f.agent, Not(f.body))))
    if isinstance(f, And):
        left, right = _rewrite(f.left), _rewrite(f.right)
        if isinstance(left, FalseConst) or isinstance(right, FalseConst):
            return FalseConst()
        if isinstance(left, TrueConst):
            return right
        if isinstance(right, TrueConst):
            return left
        return And(left, right)
    if isinstance(f, Or):
        left, right = _rewrite(f.left), _rewrite(f.right)
        if isinstance(left, TrueConst) or isinstance(right, TrueConst):
            return TrueConst()
        if isinstance(left, FalseConst):
            return right
        if isinstance(right, FalseConst):
            return left
        return Or(left, right)
    if isinstance(f, Box):
        body = _rewrite(f.body)
        if isinstance(body, TrueConst):
            return TrueConst()
        return Box(f.agent, body)
    raise TypeError(f"not a formula: {f!r}")


def _negate(f: Formula) -> Formula:
    """Push one negation through the top connective of a rewritten formula."""
    if isinstance(f, TrueConst):
        return FalseConst()
    if isinstance(f, FalseConst):
        return TrueConst()
    if isinstance(f, Not):
        return f.body
    if isinstance(f, Prop):
        return Not(f)
    if isinstance(f, And):
        return Or(_negate(f.left), _negate(f.right))
    if isinstance(f, Or):
        return And(_negate(f.left), _negate(f.right))
    if isinstance(f, Box):
        return Not(f)
    raise TypeError(f"cannot negate {f!r}")


def _as_literal(f: Formula) -> Lit | None:
    if isinstance(f, Prop):
        return Lit(f.name, True)
    if isinstance(f, Not) and isinstance(f.body, Prop):
        return Lit(f.body.name, False)
    return None


def _flatten_or(f: Formula, acc: list[Formula]) -> None:
    if isinstance(f, Or):
        _flatten_or(f.left, acc)
        _flatten_or(f.right, acc)
    elif isinstance(f, Not) and isinstance(f.body, And):
        # ~(a & b) contributes the disjuncts ~a, ~b
        _flatten_or(_negate(f.body), acc)
    else:
        acc.append(f)


def to_snf(f: Formula, gen: SymbolSource | None = None) -> ClauseSet:
    """Translate a formula into an equisatisfiable SNF clause set.

    The translation seeds the pair start -> t0, t0 -> f and then splits
    conjunctions, renames non-literal disjuncts and renames non-literal
    operands of modal operators, introducing fresh surrogates in
    left-to-right introduction order.
    """
    if any(isinstance(g, Start) for g in _walk(f)):
        raise ValueError("input formula may not contain 'start'")
    gen = gen or SymbolSource()
    out = ClauseSet()
    seed = gen.fresh()
    out.add(initial_clause([seed]), ORIGIN_INPUT)
    _translate(seed, _rewrite(f), gen, out)
    return out


def _walk(f: Formula):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (And, Or, Implies, Iff)):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, (Box, Dia)):
            stack.append(g.body)


def _rename(body: Formula, gen: SymbolSource, out: ClauseSet,
            pending: list[tuple[Lit, Formula]]) -> Lit:
    """Allocate a surrogate for a non-literal formula; its defining clause
    is processed after the clause that introduced it."""
    t = gen.fresh()
    pending.append((t, body))
    return t


def _translate(lhs: Lit, body: Formula, gen: SymbolSource, out: ClauseSet) -> None:
    """Emit clauses for "lhs implies body" under the universal operator."""
    while isinstance(body, Not) and isinstance(body.body, (And, Or)):
        body = _negate(body.body)
    pending: list[tuple[Lit, Formula]] = []
    if isinstance(body, TrueConst):
        pass
    elif isinstance(body, FalseConst):
        out.add(literal_clause([complement(lhs)]), ORIGIN_INPUT)
    elif isinstance(body, And):
        _translate(lhs, body.left, gen, out)
        _translate(lhs, body.right, gen, out)
        return
    elif isinstance(body, Not) and isinstance(body.body, Box):
        # lhs -> <a> ~psi, in box form: a negative modal clause
        box = body.body
        inner = _as_literal(box.body)
        if inner is not None:
            out.add(neg_modal(lhs, box.agent, inner), ORIGIN_INPUT)
        else:
            t = _rename(_negate(box.body), gen, out, pending)
            out.add(neg_modal(lhs, box.agent, complement(t)), ORIGIN_INPUT)
    elif isinstance(body, Box):
        inner = _as_literal(body.body)
        if inner is not None:
            out.add(pos_modal(lhs, body.agent, inner), ORIGIN_INPUT)
        else:
            t = _rename(body.body, gen, out, pending)
            out.add(pos_modal(lhs, body.agent, t), ORIGIN_INPUT)
    else:
        # a literal or a disjunction: build one literal clause, renaming
        # every non-literal disjunct
        parts: list[Formula] = []
        _flatten_or(body, parts)
        if any(isinstance(p, TrueConst) for p in parts):
            return
        lits = [complement(lhs)]
        for part in parts:
            if isinstance(part, FalseConst):
                continue
            lit = _as_literal(part)
            if lit is None:
                lit = _rename(part, gen, out, pending)
            lits.append(lit)
        out.add(literal_clause(lits), ORIGIN_INPUT)
    for t, sub in pending:
        _translate(t, sub, gen, out)


# ============================================================
# Definition clauses
# ============================================================

def clause_set_literals(clauses) -> set[Lit]:
    """Both polarities of every non-definition symbol in the clause set."""
    out: set[Lit] = set()
    for c in clauses:
        for l in c.literals():
            if not is_definition_symbol(l.symbol):
                out.add(Lit(l.symbol, True))
                out.add(Lit(l.symbol, False))
    return out


def definition_clauses(symbols: set[Lit], agents: set[int]) -> ClauseSet:
    """The two clauses axiomatizing w(a,l) as <a>l, for every agent and
    literal: w -> ~[a]~l and ~w -> [a]~l.  Introduced once, up front.
    Literals over definition symbols are rejected: definitions are never
    nested."""
    for l in symbols:
        if is_definition_symbol(l.symbol):
            raise ValueError(f"definition symbol {l.symbol!r} cannot itself "
                             "receive a definition")
    out = ClauseSet()
    for agent in sorted(agents):
        for l in sorted(symbols, key=lit_key):
            w = definition_symbol(agent, l)
            out.add(neg_modal(w, agent, complement(l)), ORIGIN_DEFINITION)
            out.add(pos_modal(complement(w), agent, complement(l)), ORIGIN_DEFINITION)
    return out


def scan_definition_table(clauses) -> dict[tuple[int, Lit], Lit]:
    """Recover the (agent, literal) -> definition-symbol map from clauses
    matching the definition pattern.  Works on generated sets and on
    clause files alike."""
    pos: set[tuple[Lit, int, Lit]] = set()
    neg: set[tuple[Lit, int, Lit]] = set()
    for c in clauses:
        if c.lhs is None or not is_definition_symbol(c.lhs.symbol):
            continue
        entry = (Lit(c.lhs.symbol, True), c.agent, complement(c.rhs))
        if c.kind is ClauseKind.NEG_MODAL and c.lhs.positive:
            neg.add(entry)
        elif c.kind is ClauseKind.POS_MODAL and not c.lhs.positive:
            pos.add(entry)
    table: dict[tuple[int, Lit], Lit] = {}
    for w, agent, lit in neg & pos:
        table[(agent, lit)] = w
    return table
