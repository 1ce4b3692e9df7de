"""Inference rules of the clausal calculus and per-agent logic selection.

The K fragment has seven rules: classical resolution among initial and
literal clauses (IRES1, IRES2, LRES) and four modal rules (MRES, NEC1,
NEC2, NEC3).  Each confluence axiom family contributes unary rules whose
conclusions inject the corresponding frame condition into the clause set;
conclusions that name a possibility <a>l do so through a pre-generated
definition symbol w(a,l).

Every rule is a total function from premise clauses to the conclusion
clause; shape violations raise CalculusError.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import Box, Dia, Formula, Implies, Lit, Prop, complement
from .semantics import FrameProperty
from .snf import (Clause, ClauseKind, initial_clause, is_definition_symbol,
                  literal_clause, neg_modal, pos_modal)


class CalculusError(ValueError):
    """A rule was applied to premises of the wrong shape."""


K_RULE_NAMES = ("IRES1", "IRES2", "LRES", "MRES", "NEC1", "NEC2", "NEC3")


@dataclass(frozen=True, slots=True)
class ResRule:
    """A confluence rule instance RES[agent]{p,q,r,s}."""

    agent: int
    p: int
    q: int
    r: int
    s: int

    @property
    def params(self) -> tuple[int, int, int, int]:
        return (self.p, self.q, self.r, self.s)

    @property
    def name(self) -> str:
        return f"RES[{self.agent}]{{{self.p},{self.q},{self.r},{self.s}}}"


# ============================================================
# Literal resolution
# ============================================================

def _check_pivot(clause: Clause, pivot: Lit) -> None:
    if pivot not in clause.disjuncts:
        raise CalculusError(f"pivot {pivot.render()} not in {clause.render()}")


def ires(first: Clause, second: Clause, pivot: Lit) -> Clause:
    """IRES1/IRES2: resolve a literal or initial clause with an initial
    clause on pivot; the conclusion is an initial clause."""
    if first.kind not in (ClauseKind.LITERAL, ClauseKind.INITIAL):
        raise CalculusError(f"first premise must be literal or initial: {first.render()}")
    if second.kind is not ClauseKind.INITIAL:
        raise CalculusError(f"second premise must be initial: {second.render()}")
    _check_pivot(first, pivot)
    _check_pivot(second, complement(pivot))
    rest = (first.disjuncts - {pivot}) | (second.disjuncts - {complement(pivot)})
    return initial_clause(rest)


def lres(c1: Clause, c2: Clause, pivot: Lit) -> Clause:
    """LRES: classical resolution between two literal clauses."""
    if c1.kind is not ClauseKind.LITERAL or c2.kind is not ClauseKind.LITERAL:
        raise CalculusError("LRES needs two literal clauses")
    _check_pivot(c1, pivot)
    _check_pivot(c2, complement(pivot))
    rest = (c1.disjuncts - {pivot}) | (c2.disjuncts - {complement(pivot)})
    return literal_clause(rest)


# ============================================================
# Modal resolution
# ============================================================

def mres(pos: Clause, neg: Clause) -> Clause:
    """MRES: a box and its negation over the same agent and literal cannot
    hold at the same world."""
    if pos.kind is not ClauseKind.POS_MODAL or neg.kind is not ClauseKind.NEG_MODAL:
        raise CalculusError("MRES needs a positive and a negative modal clause")
    if pos.agent != neg.agent:
        raise CalculusError("MRES premises must refer to the same agent")
    if pos.rhs != neg.rhs:
        raise CalculusError("MRES premises must box the same literal")
    return literal_clause([complement(pos.lhs), complement(neg.lhs)])


def nec1(pos: list[Clause], neg: Clause, lit: Clause) -> Clause:
    """NEC1: positives box the negations of all literal-clause disjuncts
    except one, which the negative clause contributes; m = 0 is allowed."""
    if neg.kind is not ClauseKind.NEG_MODAL:
        raise CalculusError("NEC1 needs a negative modal clause")
    if lit.kind is not ClauseKind.LITERAL:
        raise CalculusError("NEC1 needs a literal clause")
    if neg.rhs not in lit.disjuncts:
        raise CalculusError("the negative clause's literal must be a disjunct")
    _match_cover(pos, list(lit.disjuncts - {neg.rhs}), neg.agent)
    return literal_clause([complement(c.lhs) for c in pos] + [complement(neg.lhs)])


def nec2(pos1: Clause, pos2: Clause, neg: Clause) -> Clause:
    """NEC2: two positive clauses boxing complementary literals plus any
    negative clause of the same agent."""
    for c in (pos1, pos2):
        if c.kind is not ClauseKind.POS_MODAL:
            raise CalculusError(f"not a positive modal clause: {c.render()}")
    if neg.kind is not ClauseKind.NEG_MODAL:
        raise CalculusError("NEC2 needs a negative modal clause")
    if not (pos1.agent == pos2.agent == neg.agent):
        raise CalculusError("NEC2 premises must refer to the same agent")
    if pos1.rhs != complement(pos2.rhs):
        raise CalculusError("NEC2 positive premises must box complementary literals")
    return literal_clause([complement(pos1.lhs), complement(pos2.lhs),
                           complement(neg.lhs)])


def nec3(pos: list[Clause], neg: Clause, lit: Clause) -> Clause:
    """NEC3: positives box the negations of every literal-clause disjunct;
    the negative clause only supplies the successor and its boxed literal
    must not be a disjunct.  m = 0 is excluded."""
    if not pos:
        raise CalculusError("NEC3 requires at least one positive premise")
    if neg.kind is not ClauseKind.NEG_MODAL:
        raise CalculusError("NEC3 needs a negative modal clause")
    if lit.kind is not ClauseKind.LITERAL:
        raise CalculusError("NEC3 needs a literal clause")
    if neg.rhs in lit.disjuncts:
        raise CalculusError("the negative clause's literal may not be a disjunct")
    _match_cover(pos, list(lit.disjuncts), neg.agent)
    return literal_clause([complement(c.lhs) for c in pos] + [complement(neg.lhs)])


def _match_cover(pos: list[Clause], disjuncts: list[Lit], agent: int) -> None:
    """Check that each disjunct is covered by exactly one positive clause."""
    if len(pos) != len(disjuncts):
        raise CalculusError("positive premises must cover the disjuncts exactly")
    remaining = list(disjuncts)
    for c in pos:
        if c.kind is not ClauseKind.POS_MODAL:
            raise CalculusError(f"not a positive modal clause: {c.render()}")
        if c.agent != agent:
            raise CalculusError("premises must refer to the same agent")
        want = complement(c.rhs)
        if want not in remaining:
            raise CalculusError(f"{c.render()} covers no remaining disjunct")
        remaining.remove(want)


# ============================================================
# Confluence rules
# ============================================================

Definitions = Mapping[tuple[int, Lit], Lit]

# Rule parameter tuples by the premise kind they consume.
POS_PREMISE_PARAMS = {(0, 1, 0, 0), (1, 1, 0, 0), (0, 1, 0, 1), (0, 1, 1, 1),
                      (1, 1, 0, 1), (1, 1, 1, 0), (1, 1, 1, 1)}
NEG_PREMISE_PARAMS = {(1, 0, 0, 0), (1, 0, 1, 0), (1, 0, 1, 1)}
LIT_PREMISE_PARAMS = {(0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1)}

ALL_RULE_PARAMS = POS_PREMISE_PARAMS | NEG_PREMISE_PARAMS | LIT_PREMISE_PARAMS


def _definition(defs: Definitions, agent: int, l: Lit) -> Lit:
    if is_definition_symbol(l.symbol):
        raise CalculusError(
            f"definition symbols are never nested: {l.render()}")
    w = defs.get((agent, l))
    if w is None:
        raise CalculusError(
            f"no definition symbol for agent {agent}, literal {l.render()}")
    return w


def confluence_step(rule: ResRule, premise: Clause, defs: Definitions = {},
                    pivot: Lit | None = None) -> Clause:
    """Apply one confluence rule to its single premise.

    Rules consuming a literal clause take the distinguished disjunct as
    pivot; their conclusions are only in clause form when the remainder D
    is a single literal, so multi-literal remainders must be renamed by
    the caller (these rules are disabled by default).
    """
    a = rule.agent
    params = rule.params
    if params in POS_PREMISE_PARAMS:
        if premise.kind is not ClauseKind.POS_MODAL or premise.agent != a:
            raise CalculusError(
                f"{rule.name} needs a positive modal clause for agent {a}")
        l, lp = premise.lhs, premise.rhs
        if params == (0, 1, 0, 0):     # reflexive: l -> [a]l'  /  true -> ~l | l'
            return literal_clause([complement(l), lp])
        if params == (1, 1, 0, 0):     # symmetric: / ~l' -> [a]~l
            return pos_modal(complement(lp), a, complement(l))
        if params == (0, 1, 0, 1):     # serial: / l -> ~[a]~l'
            return neg_modal(l, a, complement(lp))
        if params == (0, 1, 1, 1):     # 0111-convergent: / l -> [a] w(a,l')
            return pos_modal(l, a, _definition(defs, a, lp))
        if params == (1, 1, 0, 1):     # 0111-convergent dual: / w(a,l) -> ~[a]~l'
            return neg_modal(_definition(defs, a, l), a, complement(lp))
        if params == (1, 1, 1, 0):     # euclidean dual: / w(a,l) -> [a]l'
            return pos_modal(_definition(defs, a, l), a, lp)
        if params == (1, 1, 1, 1):     # convergent: / w(a,l) -> [a] w(a,l')
            return pos_modal(_definition(defs, a, l), a, _definition(defs, a, lp))
    if params in NEG_PREMISE_PARAMS:
        if premise.kind is not ClauseKind.NEG_MODAL or premise.agent != a:
            raise CalculusError(
                f"{rule.name} needs a negative modal clause for agent {a}")
        l, lp = premise.lhs, complement(premise.rhs)
        if params == (1, 0, 0, 0):     # modally banal dual: l -> <a>l' / true -> ~l | l'
            return literal_clause([complement(l), lp])
        if params == (1, 0, 1, 0):     # functional: / l -> [a]l'
            return pos_modal(l, a, lp)
        if params == (1, 0, 1, 1):     # euclidean: / l -> [a] w(a,l')
            return pos_modal(l, a, _definition(defs, a, lp))
    if params in LIT_PREMISE_PARAMS:
        if premise.kind is not ClauseKind.LITERAL:
            raise CalculusError(f"{rule.name} needs a literal clause")
        if pivot is None or pivot not in premise.disjuncts:
            raise CalculusError(f"{rule.name} needs a pivot disjunct")
        rest = premise.disjuncts - {pivot}
        if len(rest) != 1:
            raise CalculusError(
                f"{rule.name} conclusion is out of clause form for a "
                f"{len(rest)}-literal remainder; rename first")
        lhs = complement(next(iter(rest)))
        if params == (0, 0, 0, 1):     # reflexive: true -> D | l  /  ~D -> ~[a]~l
            return neg_modal(lhs, a, complement(pivot))
        if params == (0, 0, 1, 0):     # modally banal: / ~D -> [a]l
            return pos_modal(lhs, a, pivot)
        if params == (0, 0, 1, 1):     # symmetric: / ~D -> [a] w(a,l)
            return pos_modal(lhs, a, _definition(defs, a, pivot))
    raise CalculusError(f"unknown rule parameters {params}")


# ============================================================
# Logic selection
# ============================================================

@dataclass(frozen=True)
class Family:
    """One axiom family: its G{p,q,r,s} parameter rows (primary first,
    dual second where one exists), frame condition, and the rule subsets
    used by default and under --all-rules."""

    name: str
    axiom_params: tuple[tuple[int, int, int, int], ...]
    frame_property: FrameProperty
    default_rules: tuple[tuple[int, int, int, int], ...]


FAMILIES: dict[str, Family] = {f.name: f for f in (
    Family("B", ((0, 0, 1, 1), (1, 1, 0, 0)), FrameProperty.SYMMETRIC,
           ((1, 1, 0, 0),)),
    Family("Ban", ((0, 0, 1, 0), (1, 0, 0, 0)), FrameProperty.MODALLY_BANAL,
           ((1, 0, 0, 0),)),
    Family("D", ((0, 1, 0, 1),), FrameProperty.SERIAL,
           ((0, 1, 0, 1),)),
    Family("F", ((1, 0, 1, 0),), FrameProperty.FUNCTIONAL,
           ((1, 0, 1, 0),)),
    Family("T", ((0, 0, 0, 1), (0, 1, 0, 0)), FrameProperty.REFLEXIVE,
           ((0, 1, 0, 0),)),
    Family("5", ((1, 0, 1, 1), (1, 1, 1, 0)), FrameProperty.EUCLIDEAN,
           ((1, 0, 1, 1),)),
    Family("G1", ((1, 1, 1, 1),), FrameProperty.CONVERGENT,
           ((1, 1, 1, 1),)),
    Family("G0111", ((0, 1, 1, 1), (1, 1, 0, 1)), FrameProperty.CONVERGENT_0111,
           ((0, 1, 1, 1),)),
)}

FAMILY_NAMES = ("K",) + tuple(FAMILIES)

# Rules whose conclusions mention definition symbols.
_DEFINITION_RULE_PARAMS = {(0, 0, 1, 1), (0, 1, 1, 1), (1, 1, 0, 1),
                           (1, 1, 1, 0), (1, 0, 1, 1), (1, 1, 1, 1)}


class LogicSpecError(ValueError):
    pass


@dataclass(frozen=True)
class LogicSpec:
    """Per-agent selection of axiom families.

    Unlisted agents are plain K.  The default rule set follows the
    completeness results: the literal-premise rules RES{0,0,r,s} are
    omitted and the Euclidean and 0111-convergent families use a single
    rule each; all_rules enables the full per-family rule tables.
    """

    families: tuple[tuple[int, frozenset[str]], ...] = ()
    all_rules: bool = False

    @classmethod
    def make(cls, families: Mapping[int, Iterable] | None = None,
             all_rules: bool = False) -> "LogicSpec":
        items = []
        for agent in sorted(families or {}):
            fams = frozenset(families[agent]) - {"K"}
            for f in fams:
                if f not in FAMILIES:
                    raise LogicSpecError(f"unknown axiom family {f!r}")
            if fams:
                items.append((agent, fams))
        return cls(tuple(items), all_rules)

    @classmethod
    def parse(cls, text: str, all_rules: bool = False) -> "LogicSpec":
        """Parse 'agent:family,family;agent:...', e.g. '1:T,5;2:K'."""
        families: dict[int, set[str]] = {}
        text = text.strip()
        if not text:
            return cls.make({}, all_rules)
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            head, sep, rest = part.partition(":")
            if not sep or not head.strip().isdigit():
                raise LogicSpecError(f"bad logic component {part!r}")
            agent = int(head)
            if agent < 1:
                raise LogicSpecError("agent indices start at 1")
            names = {n.strip() for n in rest.split(",") if n.strip()}
            for n in names:
                if n not in FAMILY_NAMES:
                    raise LogicSpecError(f"unknown axiom family {n!r}")
            families.setdefault(agent, set()).update(names)
        return cls.make(families, all_rules)

    def render(self) -> str:
        if not self.families:
            return "K"
        return ";".join(f"{a}:{','.join(sorted(fams))}"
                        for a, fams in self.families)

    def families_for(self, agent: int) -> frozenset[str]:
        for a, fams in self.families:
            if a == agent:
                return fams
        return frozenset()

    def rules_for(self, agent: int) -> tuple[ResRule, ...]:
        rules = []
        for fam_name in sorted(self.families_for(agent)):
            fam = FAMILIES[fam_name]
            params = fam.axiom_params if self.all_rules else fam.default_rules
            rules.extend(ResRule(agent, *p) for p in params)
        return tuple(sorted(set(rules), key=lambda r: r.params))

    def frame_properties(self) -> dict[int, tuple[FrameProperty, ...]]:
        out = {}
        for agent, fams in self.families:
            props = sorted({FAMILIES[f].frame_property for f in fams},
                           key=lambda p: p.value)
            out[agent] = tuple(props)
        return out

    def needs_definitions(self, agent: int) -> bool:
        return any(r.params in _DEFINITION_RULE_PARAMS
                   for r in self.rules_for(agent))

    def agents(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.families)


# ============================================================
# Axiom instances (for validity testing)
# ============================================================

def g_axiom(p: int, q: int, r: int, s: int, agent: int,
            phi: Formula | None = None) -> Formula:
    """The axiom <a>^p [a]^q phi -> [a]^r <a>^s phi."""
    phi = phi if phi is not None else Prop("p")
    left = phi
    for _ in range(q):
        left = Box(agent, left)
    for _ in range(p):
        left = Dia(agent, left)
    right = phi
    for _ in range(s):
        right = Dia(agent, right)
    for _ in range(r):
        right = Box(agent, right)
    return Implies(left, right)


def family_axioms(name: str, agent: int = 1) -> list[Formula]:
    """Both schema instances (primary and dual) of a family with phi = p."""
    fam = FAMILIES[name]
    return [g_axiom(*params, agent) for params in fam.axiom_params]
