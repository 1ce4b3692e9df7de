"""Saturation: drive the inference rules to contradiction or closure.

A given-clause loop: a passive queue ordered by (clause size, insertion
index) feeds an active set.  On selection a clause is dropped if an
active clause subsumes it (forward subsumption); on activation it flags
the active clauses it subsumes (backward subsumption), is combined with
the active set under every enabled rule, and has the unary confluence
rules applied to it once.  Subsumed and tautological clauses become
inactive but stay recorded, so clause indices are stable and proofs can
always be extracted.

The loop is deterministic: ties in the passive order break on insertion
index and all partner iteration follows recorded order.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass

from .calculus import (LIT_PREMISE_PARAMS, NEG_PREMISE_PARAMS,
                       POS_PREMISE_PARAMS, CalculusError, LogicSpec, ResRule,
                       confluence_step, ires, lres, mres, nec1, nec2, nec3)
from .formula import Lit, complement, lit_key
from .snf import (ORIGIN_DEFINITION, ORIGIN_INPUT, RENAME_PREFIX, Clause,
                  ClauseKind, ClauseSet, SymbolSource, literal_clause,
                  scan_definition_table)


# ============================================================
# Verdicts and proofs
# ============================================================

@dataclass(frozen=True)
class ProofStep:
    number: int
    clause: Clause
    rule: str
    premises: tuple[int, ...]   # step numbers, 1-based

    def render(self) -> str:
        if self.premises:
            just = f"[{self.rule}, {','.join(map(str, self.premises))}]"
        else:
            just = f"[{self.rule}]"
        return f"{self.number}. {self.clause.render()}  {just}"


@dataclass(frozen=True)
class Proof:
    """Topologically ordered ancestor closure of a contradiction."""

    steps: tuple[ProofStep, ...]

    def rule_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for step in self.steps:
            if step.rule not in (ORIGIN_INPUT, ORIGIN_DEFINITION):
                counts[step.rule] = counts.get(step.rule, 0) + 1
        return counts

    def last_clause(self) -> Clause:
        return self.steps[-1].clause

    def render(self) -> str:
        return "\n".join(step.render() for step in self.steps)


@dataclass(frozen=True)
class Unsatisfiable:
    proof: Proof
    clause_set: ClauseSet


@dataclass(frozen=True)
class Saturated:
    clause_set: ClauseSet


@dataclass(frozen=True)
class ResourceLimit:
    reason: str
    clause_set: ClauseSet


Verdict = Unsatisfiable | Saturated | ResourceLimit


@dataclass(frozen=True)
class Limits:
    max_clauses: int = 100_000
    max_seconds: float = 60.0


# ============================================================
# Simplification and subsumption
# ============================================================

def simplify(c: Clause) -> Clause | None:
    """Merge duplicate disjuncts (inherent in the set representation) and
    discard tautologies; returns None for tautologies."""
    return None if c.is_tautology() else c


def subsumes(general: Clause, specific: Clause) -> bool:
    """Syntactic subsumption: disjunction clauses subsume supersets of the
    same kind, a literal clause also subsumes initial clauses, and modal
    clauses subsume only their duplicates."""
    if general.kind is ClauseKind.LITERAL:
        if specific.kind in (ClauseKind.LITERAL, ClauseKind.INITIAL):
            return general.disjuncts <= specific.disjuncts
        return False
    if general.kind is ClauseKind.INITIAL:
        return (specific.kind is ClauseKind.INITIAL
                and general.disjuncts <= specific.disjuncts)
    return general == specific


# ============================================================
# Proof extraction
# ============================================================

def extract_proof(cs: ClauseSet, contradiction_index: int) -> Proof:
    """Minimal ancestor closure of the contradiction, renumbered 1..n in
    derivation order."""
    if not (0 <= contradiction_index < len(cs.records)):
        raise ValueError(f"no clause at index {contradiction_index}")
    if not cs.records[contradiction_index].clause.is_contradiction():
        raise ValueError(
            f"clause {contradiction_index} is not a contradiction")
    needed = {contradiction_index}
    stack = [contradiction_index]
    while stack:
        idx = stack.pop()
        for p in cs.records[idx].premises:
            if p not in needed:
                needed.add(p)
                stack.append(p)
    ordered = sorted(needed)
    renumber = {idx: n for n, idx in enumerate(ordered, start=1)}
    steps = tuple(
        ProofStep(renumber[idx], cs.records[idx].clause, cs.records[idx].rule,
                  tuple(renumber[p] for p in cs.records[idx].premises))
        for idx in ordered)
    return Proof(steps)


# ============================================================
# The given-clause loop
# ============================================================

class _State:
    def __init__(self, cs: ClauseSet, spec: LogicSpec, limits: Limits):
        self.cs = cs
        self.spec = spec
        self.limits = limits
        self.defs = scan_definition_table(cs.clauses())
        self.passive: list[tuple[int, int]] = []
        self.active_initial: list[int] = []
        self.active_literal: list[int] = []
        self.active_pos: dict[int, list[int]] = {}
        self.active_neg: dict[int, list[int]] = {}
        self.contradiction: int | None = None
        self.rename_gen = SymbolSource(RENAME_PREFIX)
        self.renamed: dict[tuple[int, frozenset[Lit]], Lit] = {}
        for idx, rec in enumerate(cs.records):
            self._queue(idx)

    # ---- bookkeeping ----

    def _queue(self, idx: int) -> None:
        rec = self.cs.records[idx]
        if rec.clause.is_contradiction() and self.contradiction is None:
            self.contradiction = idx
        heapq.heappush(self.passive, (rec.clause.size(), idx))

    def record(self, clause: Clause, rule: str, premises: tuple[int, ...]) -> None:
        """Simplify and record a derived clause; queue it if new."""
        clause = simplify(clause)
        if clause is None:
            return
        before = len(self.cs.records)
        idx = self.cs.add(clause, rule, premises)
        if idx is not None and idx == before:
            self._queue(idx)

    def active_partners(self, kind: ClauseKind, agent: int | None = None) -> list[int]:
        if kind is ClauseKind.INITIAL:
            pool = self.active_initial
        elif kind is ClauseKind.LITERAL:
            pool = self.active_literal
        elif kind is ClauseKind.POS_MODAL:
            pool = self.active_pos.get(agent, [])
        else:
            pool = self.active_neg.get(agent, [])
        return [i for i in pool if self.cs.records[i].active]

    def activate(self, idx: int) -> None:
        clause = self.cs.records[idx].clause
        if clause.kind is ClauseKind.INITIAL:
            self.active_initial.append(idx)
        elif clause.kind is ClauseKind.LITERAL:
            self.active_literal.append(idx)
        elif clause.kind is ClauseKind.POS_MODAL:
            self.active_pos.setdefault(clause.agent, []).append(idx)
        else:
            self.active_neg.setdefault(clause.agent, []).append(idx)

    # ---- rule generation ----

    def resolve_disjunctions(self, idx: int) -> None:
        """IRES1/IRES2/LRES between the given clause and the active set."""
        clause = self.cs.records[idx].clause
        if clause.kind is ClauseKind.INITIAL:
            for j in self.active_partners(ClauseKind.INITIAL):
                self._binary_resolve(j, idx, "IRES2", ires)
                self._binary_resolve(idx, j, "IRES2", ires)
            for j in self.active_partners(ClauseKind.LITERAL):
                self._binary_resolve(j, idx, "IRES1", ires)
        else:
            for j in self.active_partners(ClauseKind.INITIAL):
                self._binary_resolve(idx, j, "IRES1", ires)
            for j in self.active_partners(ClauseKind.LITERAL):
                self._binary_resolve(idx, j, "LRES", lres)
                self._binary_resolve(j, idx, "LRES", lres)

    def _binary_resolve(self, first: int, second: int, rule: str, fn) -> None:
        c1 = self.cs.records[first].clause
        c2 = self.cs.records[second].clause
        for pivot in sorted(c1.disjuncts, key=lit_key):
            if complement(pivot) in c2.disjuncts:
                self.record(fn(c1, c2, pivot), rule, (first, second))

    def modal_resolve(self, idx: int) -> None:
        """MRES and NEC2 involving the given modal clause."""
        clause = self.cs.records[idx].clause
        agent = clause.agent
        if clause.kind is ClauseKind.POS_MODAL:
            for j in self.active_partners(ClauseKind.NEG_MODAL, agent):
                neg = self.cs.records[j].clause
                if neg.rhs == clause.rhs:
                    self.record(mres(clause, neg), "MRES", (idx, j))
            # NEC2 with the given clause as either positive premise
            for j in self.active_partners(ClauseKind.POS_MODAL, agent):
                other = self.cs.records[j].clause
                if other.rhs != complement(clause.rhs):
                    continue
                for n in self.active_partners(ClauseKind.NEG_MODAL, agent):
                    neg = self.cs.records[n].clause
                    self.record(nec2(clause, other, neg), "NEC2", (idx, j, n))
        else:
            for j in self.active_partners(ClauseKind.POS_MODAL, agent):
                pos = self.cs.records[j].clause
                if pos.rhs == clause.rhs:
                    self.record(mres(pos, clause), "MRES", (j, idx))
            pos_pool = self.active_partners(ClauseKind.POS_MODAL, agent)
            for j1, j2 in itertools.combinations(pos_pool, 2):
                p1 = self.cs.records[j1].clause
                p2 = self.cs.records[j2].clause
                if p1.rhs == complement(p2.rhs):
                    self.record(nec2(p1, p2, clause), "NEC2", (j1, j2, idx))

    def necessitation(self, idx: int) -> None:
        """NEC1/NEC3 hyperresolution searches touching the given clause."""
        clause = self.cs.records[idx].clause
        if clause.kind is ClauseKind.LITERAL:
            for agent in sorted(self.active_neg):
                for n in self.active_partners(ClauseKind.NEG_MODAL, agent):
                    self._nec_covers(n, idx, require=None)
        elif clause.kind is ClauseKind.NEG_MODAL:
            for l in self.active_partners(ClauseKind.LITERAL):
                self._nec_covers(idx, l, require=None)
        elif clause.kind is ClauseKind.POS_MODAL:
            for n in self.active_partners(ClauseKind.NEG_MODAL, clause.agent):
                for l in self.active_partners(ClauseKind.LITERAL):
                    self._nec_covers(n, l, require=idx)

    def _nec_covers(self, neg_idx: int, lit_idx: int, require: int | None) -> None:
        """Enumerate NEC1/NEC3 instances for a (negative, literal) premise
        pair; positive premises are drawn from the active set plus, when
        given, the required clause."""
        neg = self.cs.records[neg_idx].clause
        lit = self.cs.records[lit_idx].clause
        agent = neg.agent
        pool = self.active_partners(ClauseKind.POS_MODAL, agent)
        if require is not None and require not in pool:
            pool = pool + [require]
        by_rhs: dict[Lit, list[int]] = {}
        for j in pool:
            by_rhs.setdefault(self.cs.records[j].clause.rhs, []).append(j)

        def enumerate_cover(disjuncts: list[Lit], name: str, fn) -> None:
            options = []
            for d in disjuncts:
                cands = by_rhs.get(complement(d))
                if not cands:
                    return
                options.append(cands)
            for combo in itertools.product(*options):
                if require is not None and require not in combo:
                    continue
                pos = [self.cs.records[j].clause for j in combo]
                premises = tuple(combo) + (neg_idx, lit_idx)
                self.record(fn(pos, neg, lit), name, premises)

        ordered = sorted(lit.disjuncts, key=lit_key)
        if neg.rhs in lit.disjuncts:
            others = [d for d in ordered if d != neg.rhs]
            if require is None and not others:
                # m = 0: no positive premises at all
                self.record(nec1([], neg, lit), "NEC1", (neg_idx, lit_idx))
            elif others:
                enumerate_cover(others, "NEC1", nec1)
        elif lit.disjuncts:
            enumerate_cover(ordered, "NEC3", nec3)

    def confluence(self, idx: int) -> None:
        """Apply each enabled unary confluence rule to the given clause."""
        clause = self.cs.records[idx].clause
        if clause.kind is ClauseKind.INITIAL:
            return
        agents = ([clause.agent] if clause.agent is not None
                  else [a for a, _ in self.spec.families])
        for agent in agents:
            for rule in self.spec.rules_for(agent):
                self._apply_confluence(rule, idx, clause)

    def _apply_confluence(self, rule: ResRule, idx: int, clause: Clause) -> None:
        params = rule.params
        if clause.kind is ClauseKind.LITERAL:
            if params not in LIT_PREMISE_PARAMS:
                return
            for pivot in sorted(clause.disjuncts, key=lit_key):
                rest = clause.disjuncts - {pivot}
                if len(rest) == 1:
                    self._record_confluence(rule, clause, idx, pivot)
                else:
                    self._confluence_renamed(rule, clause, idx, pivot, rest)
        elif clause.kind is ClauseKind.POS_MODAL:
            if params in POS_PREMISE_PARAMS:
                self._record_confluence(rule, clause, idx)
        elif clause.kind is ClauseKind.NEG_MODAL:
            if params in NEG_PREMISE_PARAMS:
                self._record_confluence(rule, clause, idx)

    def _record_confluence(self, rule: ResRule, clause: Clause, idx: int,
                           pivot: Lit | None = None) -> None:
        try:
            conclusion = confluence_step(rule, clause, self.defs, pivot)
        except CalculusError:
            # nested or missing definition symbol: skipped, not an error
            return
        self.record(conclusion, rule.name, (idx,))

    def _confluence_renamed(self, rule: ResRule, clause: Clause, idx: int,
                            pivot: Lit, rest: frozenset[Lit]) -> None:
        """RES{0,0,r,s} with a remainder D of zero or several literals:
        the conclusion ~D -> M is restored to clause form with a surrogate
        u, emitting true -> D | u and u -> M.  Reached only under
        --all-rules; the surrogate is reused across applications."""
        key = (rule.agent, rest)
        u = self.renamed.get(key)
        fresh = u is None
        if fresh:
            u = self.rename_gen.fresh()
        try:
            # feed the rule the 2-literal stand-in true -> ~u | pivot, so
            # the conclusion comes out as u -> M
            conclusion = confluence_step(
                rule, literal_clause({complement(u), pivot}), self.defs, pivot)
        except CalculusError:
            return
        if fresh:
            self.renamed[key] = u
            self.record(literal_clause(set(rest) | {u}), rule.name, (idx,))
        self.record(conclusion, rule.name, (idx,))

    # ---- main loop ----

    def run(self) -> Verdict:
        if self.contradiction is not None:
            return Unsatisfiable(extract_proof(self.cs, self.contradiction),
                                 self.cs)
        deadline = time.monotonic() + self.limits.max_seconds
        while self.passive:
            if len(self.cs.records) > self.limits.max_clauses:
                return ResourceLimit(
                    f"clause limit {self.limits.max_clauses} exceeded", self.cs)
            if time.monotonic() > deadline:
                return ResourceLimit(
                    f"time limit {self.limits.max_seconds}s exceeded", self.cs)
            _, idx = heapq.heappop(self.passive)
            rec = self.cs.records[idx]
            if not rec.active:
                continue
            # forward subsumption on selection
            if any(subsumes(other.clause, rec.clause)
                   for other in self._active_records()):
                rec.active = False
                continue
            # backward subsumption
            for other in self._active_records():
                if subsumes(rec.clause, other.clause):
                    other.active = False
            self.resolve_disjunctions(idx)
            if rec.clause.is_modal():
                self.modal_resolve(idx)
            self.necessitation(idx)
            self.confluence(idx)
            self.activate(idx)
            if self.contradiction is not None:
                return Unsatisfiable(
                    extract_proof(self.cs, self.contradiction), self.cs)
        return Saturated(self.cs)

    def _active_records(self):
        for pool in (self.active_initial, self.active_literal):
            for i in pool:
                rec = self.cs.records[i]
                if rec.active:
                    yield rec
        for table in (self.active_pos, self.active_neg):
            for pool in table.values():
                for i in pool:
                    rec = self.cs.records[i]
                    if rec.active:
                        yield rec


def saturate(cs: ClauseSet, spec: LogicSpec | None = None,
             limits: Limits | None = None) -> Verdict:
    """Saturate the clause set under the enabled rules.  The set grows in
    place (a derivation); the verdict carries it for trace rendering."""
    return _State(cs, spec or LogicSpec(), limits or Limits()).run()


def render_trace(cs: ClauseSet) -> str:
    """Full derivation trace, 1-based, in the proof text format."""
    lines = []
    for n, rec in enumerate(cs.records, start=1):
        if rec.premises:
            just = f"[{rec.rule}, {','.join(str(p + 1) for p in rec.premises)}]"
        else:
            just = f"[{rec.rule}]"
        lines.append(f"{n}. {rec.clause.render()}  {just}")
    return "\n".join(lines)
