"""Finite Kripke models: evaluation, frame conditions, bounded model search.

This module is the semantic oracle used for testing and countermodel
reporting.  It is deliberately independent of the resolution calculus:
satisfiability is decided by exhaustive enumeration of pointed models up
to a world bound, never by inference.

Enumeration order (the contract for reproducible countermodels): world
counts ascending; for a fixed count k, each agent's relation is encoded
as a k*k bitset (bit i*k+j set iff world i sees world j) and enumerated
as an ascending integer, lower-numbered agents varying slowest; then
valuations, assigned world by world ascending, each world's valuation an
ascending integer over the sorted symbol list.  The first model in this
order is returned.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .formula import (And, Box, Dia, FalseConst, Formula, Iff, Implies, Lit,
                      Not, Or, Prop, Start, TrueConst, complement)
from .snf import Clause, ClauseKind

# Enumeration beyond this many worlds is refused unless forced; the model
# space grows as 2^(k*k) per agent.
DEFAULT_WORLD_GUARD = 5

# Joint symbol*world bit budget for the enumerative searches.
_SYMBOL_BUDGET = 22


class FrameProperty(enum.Enum):
    """First-order frame conditions, one per axiom family."""

    SYMMETRIC = "symmetric"
    MODALLY_BANAL = "modally banal"
    SERIAL = "serial"
    FUNCTIONAL = "functional"
    REFLEXIVE = "reflexive"
    EUCLIDEAN = "euclidean"
    CONVERGENT = "convergent"
    CONVERGENT_0111 = "0,1,1,1-convergent"


@dataclass(frozen=True)
class KripkeModel:
    """Finite pointed model; world 0 is the distinguished world."""

    n_worlds: int
    relations: Mapping[int, frozenset[tuple[int, int]]]
    valuation: tuple[frozenset[str], ...]

    def successors(self, agent: int, world: int) -> list[int]:
        rel = self.relations.get(agent, frozenset())
        return sorted(v for (u, v) in rel if u == world)

    def render(self) -> str:
        lines = [f"worlds: {self.n_worlds}"]
        for agent in sorted(self.relations):
            pairs = sorted(self.relations[agent])
            edges = " ".join(f"w{u}->w{v}" for u, v in pairs) or "-"
            lines.append(f"agent {agent}: {edges}")
        for w in range(self.n_worlds):
            names = " ".join(sorted(self.valuation[w])) or "-"
            lines.append(f"w{w}: {names}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "worlds": self.n_worlds,
            "distinguished": 0,
            "relations": {str(a): sorted(map(list, rel))
                          for a, rel in sorted(self.relations.items())},
            "valuation": [sorted(v) for v in self.valuation],
        }


# ============================================================
# Formula and clause evaluation
# ============================================================

def satisfies(model: KripkeModel, world: int, f: Formula) -> bool:
    """Standard Kripke satisfaction; symbols absent from the valuation are
    false, 'start' is true exactly at world 0."""
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, Start):
        return world == 0
    if isinstance(f, Prop):
        return f.name in model.valuation[world]
    if isinstance(f, Not):
        return not satisfies(model, world, f.body)
    if isinstance(f, And):
        return satisfies(model, world, f.left) and satisfies(model, world, f.right)
    if isinstance(f, Or):
        return satisfies(model, world, f.left) or satisfies(model, world, f.right)
    if isinstance(f, Implies):
        return not satisfies(model, world, f.left) or satisfies(model, world, f.right)
    if isinstance(f, Iff):
        return satisfies(model, world, f.left) == satisfies(model, world, f.right)
    if isinstance(f, Box):
        return all(satisfies(model, v, f.body)
                   for v in model.successors(f.agent, world))
    if isinstance(f, Dia):
        return any(satisfies(model, v, f.body)
                   for v in model.successors(f.agent, world))
    raise TypeError(f"not a formula: {f!r}")


def _lit_at(model: KripkeModel, world: int, l: Lit) -> bool:
    return (l.symbol in model.valuation[world]) == l.positive


def reachable_worlds(model: KripkeModel) -> frozenset[int]:
    """Worlds reachable from world 0 under the reflexive-transitive closure
    of the union of all agents' relations."""
    succ: dict[int, set[int]] = {w: set() for w in range(model.n_worlds)}
    for rel in model.relations.values():
        for u, v in rel:
            succ[u].add(v)
    seen = {0}
    frontier = [0]
    while frontier:
        w = frontier.pop()
        for v in succ[w]:
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return frozenset(seen)


def clause_holds_at(model: KripkeModel, world: int, c: Clause) -> bool:
    """Truth of the clause's implication at one world."""
    if c.kind is ClauseKind.INITIAL:
        return world != 0 or any(_lit_at(model, world, l) for l in c.disjuncts)
    if c.kind is ClauseKind.LITERAL:
        return any(_lit_at(model, world, l) for l in c.disjuncts)
    if not _lit_at(model, world, c.lhs):
        return True
    succs = model.successors(c.agent, world)
    if c.kind is ClauseKind.POS_MODAL:
        return all(_lit_at(model, v, c.rhs) for v in succs)
    return any(not _lit_at(model, v, c.rhs) for v in succs)


def holds_universally(model: KripkeModel, c: Clause) -> bool:
    """Clause truth under the implicit universal operator: at world 0 and
    every reachable world."""
    return all(clause_holds_at(model, w, c) for w in reachable_worlds(model))


# ============================================================
# Frame properties
# ============================================================

def _rows_of(model: KripkeModel, agent: int) -> tuple[int, ...]:
    rows = [0] * model.n_worlds
    for u, v in model.relations.get(agent, frozenset()):
        rows[u] |= 1 << v
    return tuple(rows)


def relation_has_property(rows: tuple[int, ...], prop: FrameProperty) -> bool:
    """Check one Table-of-frame-conditions property on a successor-bitmask
    encoding of a relation."""
    k = len(rows)
    if prop is FrameProperty.REFLEXIVE:
        return all(rows[i] >> i & 1 for i in range(k))
    if prop is FrameProperty.SYMMETRIC:
        return all(not (rows[i] >> j & 1) or (rows[j] >> i & 1)
                   for i in range(k) for j in range(k))
    if prop is FrameProperty.SERIAL:
        return all(rows[i] for i in range(k))
    if prop is FrameProperty.FUNCTIONAL:
        return all(rows[i] & (rows[i] - 1) == 0 for i in range(k))
    if prop is FrameProperty.MODALLY_BANAL:
        return all(rows[i] & ~(1 << i) == 0 for i in range(k))
    if prop is FrameProperty.EUCLIDEAN:
        for i in range(k):
            succ = rows[i]
            for j in range(k):
                if succ >> j & 1 and succ & ~rows[j]:
                    return False
        return True
    if prop is FrameProperty.CONVERGENT:
        for i in range(k):
            succ = rows[i]
            members = [j for j in range(k) if succ >> j & 1]
            for j in members:
                for m in members:
                    if not rows[j] & rows[m]:
                        return False
        return True
    if prop is FrameProperty.CONVERGENT_0111:
        for i in range(k):
            for j in range(k):
                if rows[i] >> j & 1 and not rows[i] & rows[j]:
                    return False
        return True
    raise ValueError(f"unknown frame property {prop!r}")


def frame_has_property(model: KripkeModel, agent: int, prop: FrameProperty) -> bool:
    return relation_has_property(_rows_of(model, agent), prop)


# ============================================================
# Frame enumeration
# ============================================================

def _reach_from_zero(rows_list: Iterable[tuple[int, ...]], k: int) -> int:
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        m = frontier
        while m:
            low = m & -m
            m ^= low
            w = low.bit_length() - 1
            for rows in rows_list:
                nxt |= rows[w]
        frontier = nxt & ~seen
        seen |= nxt
    return seen


@lru_cache(maxsize=None)
def _relation_list(k: int, props: tuple[FrameProperty, ...],
                   connected: bool) -> tuple[tuple[int, ...], ...]:
    """All k-world relations with the given properties, ascending bitset
    order.  With connected=True only relations whose reachable set from
    world 0 covers all k worlds are kept (meaningful for single-agent
    enumeration)."""
    full = (1 << k) - 1
    out = []
    for rel in range(1 << (k * k)):
        rows = tuple(rel >> (i * k) & full for i in range(k))
        if all(relation_has_property(rows, p) for p in props):
            if not connected or _reach_from_zero((rows,), k) == full:
                out.append(rows)
    return tuple(out)


_JOINT_CACHE: dict = {}


def _frame_list(k: int, props_per_agent: tuple[tuple[FrameProperty, ...], ...],
                connected: bool):
    """Frames for several agents: the product of per-agent relation lists,
    lower-numbered agents varying slowest; joint connectivity filter when
    requested."""
    if len(props_per_agent) == 0:
        return ((),)
    if len(props_per_agent) == 1:
        return [(rows,) for rows in _relation_list(k, props_per_agent[0], connected)]
    key = (k, props_per_agent, connected)
    cached = _JOINT_CACHE.get(key)
    if cached is not None:
        return cached
    lists = [_relation_list(k, props, False) for props in props_per_agent]
    full = (1 << k) - 1
    frames = []
    for combo in itertools.product(*lists):
        if not connected or _reach_from_zero(combo, k) == full:
            frames.append(combo)
    _JOINT_CACHE[key] = frames
    return frames


def _properties_of(logic) -> dict[int, tuple[FrameProperty, ...]]:
    """Accept a LogicSpec-like object (duck-typed via frame_properties())
    or a plain mapping agent -> properties; None means no restrictions."""
    if logic is None:
        return {}
    if hasattr(logic, "frame_properties"):
        return dict(logic.frame_properties())
    return {a: tuple(props) for a, props in logic.items()}


def _minimal_relation(k: int, props: tuple[FrameProperty, ...]) -> tuple[int, ...]:
    lst = _relation_list(k, props, False)
    if not lst:
        raise ValueError(f"no {k}-world relation satisfies {props}")
    return lst[0]


# ============================================================
# Bounded clause-set model search
# ============================================================

class _ClauseSpace:
    """Frame-independent valuation machinery for a clause set: bitmask
    domains over the 2^n valuations of the n symbols occurring in it."""

    def __init__(self, clauses: list[Clause]):
        self.clauses = clauses
        self.symbols = sorted({s for c in clauses for s in c.symbols()})
        self.sym_index = {s: i for i, s in enumerate(self.symbols)}
        n = len(self.symbols)
        self.nsym = n
        total = 1 << (1 << n)
        self.full = total - 1
        self._sym_masks = []
        for i in range(n):
            period = 1 << (i + 1)
            repeat = ((1 << (1 << n)) - 1) // ((1 << period) - 1)
            block = (1 << (1 << i)) - 1
            self._sym_masks.append(repeat * (block << (1 << i)))
        self.agents = sorted({c.agent for c in clauses if c.agent is not None})
        self.pos_by_agent = {a: [] for a in self.agents}
        self.neg_by_agent = {a: [] for a in self.agents}
        dom_all = self.full
        dom_init = self.full
        for c in clauses:
            if c.kind is ClauseKind.LITERAL:
                dom_all &= self._disj_mask(c)
            elif c.kind is ClauseKind.INITIAL:
                dom_init &= self._disj_mask(c)
            elif c.kind is ClauseKind.POS_MODAL:
                self.pos_by_agent[c.agent].append(c)
            else:
                self.neg_by_agent[c.agent].append(c)
        self.dom_all = dom_all
        self.dom_init = dom_init & dom_all
        # With no successors for agent a, a negative a-clause forces its
        # left-hand literal false; a self-loop folds each positive a-clause
        # into a single-world constraint.
        self.nosucc_mask = {}
        self.selfloop_mask = {}
        for a in self.agents:
            neg = self.neg_by_agent[a]
            self.nosucc_mask[a] = (_and_all(self.lit_mask(complement(c.lhs))
                                            for c in neg) if neg else self.full)
            pos = self.pos_by_agent[a]
            self.selfloop_mask[a] = (_and_all(
                self.lit_mask(complement(c.lhs)) | self.lit_mask(c.rhs)
                for c in pos) if pos else self.full)

    def lit_mask(self, l: Lit) -> int:
        m = self._sym_masks[self.sym_index[l.symbol]]
        return m if l.positive else self.full ^ m

    def _disj_mask(self, c: Clause) -> int:
        m = 0
        for l in c.disjuncts:
            m |= self.lit_mask(l)
        return m

    def lit_true_in(self, val: int, l: Lit) -> bool:
        return bool(val >> self.sym_index[l.symbol] & 1) == l.positive

    def value_symbols(self, val: int) -> frozenset[str]:
        return frozenset(s for i, s in enumerate(self.symbols) if val >> i & 1)


def _and_all(masks) -> int:
    out = None
    for m in masks:
        out = m if out is None else out & m
    return out


def _solve_frame(space: _ClauseSpace, frame, agents: list[int], k: int):
    """Find the first (in valuation order) assignment of per-world
    valuations compatible with the clause set on the given frame, or None."""
    rows_of = dict(zip(agents, frame))
    reach = _reach_from_zero(frame, k)
    order = [w for w in range(k) if reach >> w & 1]
    doms = []
    for w in range(k):
        if not reach >> w & 1:
            doms.append(0)
            continue
        d = space.dom_init if w == 0 else space.dom_all
        for a in agents:
            row = rows_of[a][w]
            if row == 0:
                d &= space.nosucc_mask[a]
            if row >> w & 1:
                d &= space.selfloop_mask[a]
        if d == 0:
            return None
        doms.append(d)

    assign: dict[int, int] = {}

    def propagate(w: int, val: int, cur: list[int]) -> list[int] | None:
        new = cur
        for a in agents:
            rows = rows_of[a]
            pos = space.pos_by_agent[a]
            neg = space.neg_by_agent[a]
            succ = rows[w] & ~(1 << w)
            triggered = [c for c in pos if space.lit_true_in(val, c.lhs)]
            if triggered and succ:
                allowed = _and_all(space.lit_mask(c.rhs) for c in triggered)
                m = succ
                while m:
                    low = m & -m
                    m ^= low
                    u = low.bit_length() - 1
                    if u in assign:
                        if any(not space.lit_true_in(assign[u], c.rhs)
                               for c in triggered):
                            return None
                    else:
                        if new is cur:
                            new = list(cur)
                        new[u] &= allowed
                        if new[u] == 0:
                            return None
            # constrain unassigned predecessors of w
            falsified = [c for c in pos if not space.lit_true_in(val, c.rhs)]
            if falsified:
                pred_allowed = _and_all(space.lit_mask(complement(c.lhs))
                                        for c in falsified)
                for u in order:
                    if u == w or u in assign:
                        continue
                    if rows[u] >> w & 1:
                        if new is cur:
                            new = list(cur)
                        new[u] &= pred_allowed
                        if new[u] == 0:
                            return None
        return new

    def neg_ok() -> bool:
        for a in agents:
            rows = rows_of[a]
            for c in space.neg_by_agent[a]:
                for w in order:
                    if not space.lit_true_in(assign[w], c.lhs):
                        continue
                    row = rows[w]
                    found = False
                    m = row
                    while m:
                        low = m & -m
                        m ^= low
                        u = low.bit_length() - 1
                        if not space.lit_true_in(assign[u], c.rhs):
                            found = True
                            break
                    if not found:
                        return False
        return True

    def backtrack(pos: int, cur: list[int]):
        if pos == len(order):
            return neg_ok()
        w = order[pos]
        m = cur[w]
        while m:
            low = m & -m
            m ^= low
            val = low.bit_length() - 1
            assign[w] = val
            nxt = propagate(w, val, cur)
            if nxt is not None and backtrack(pos + 1, nxt):
                return True
            del assign[w]
        return False

    if backtrack(0, doms):
        return [assign.get(w, 0) for w in range(k)]
    return None


def _build_model(space: _ClauseSpace, frame, agents: list[int], k: int,
                 values: list[int],
                 extra_props: dict[int, tuple[FrameProperty, ...]]) -> KripkeModel:
    relations = {}
    for a, rows in zip(agents, frame):
        relations[a] = frozenset((u, v) for u in range(k) for v in range(k)
                                 if rows[u] >> v & 1)
    for a, props in sorted(extra_props.items()):
        if a not in relations:
            rows = _minimal_relation(k, props)
            relations[a] = frozenset((u, v) for u in range(k) for v in range(k)
                                     if rows[u] >> v & 1)
    valuation = tuple(space.value_symbols(v) for v in values)
    return KripkeModel(k, relations, valuation)


def _search(clauses, logic, max_worlds: int, connected: bool,
            force: bool = False):
    if max_worlds < 1:
        raise ValueError("max_worlds must be positive")
    if max_worlds > DEFAULT_WORLD_GUARD and not force:
        raise ValueError(
            f"enumeration beyond {DEFAULT_WORLD_GUARD} worlds must be forced")
    clauses = list(clauses)
    space = _ClauseSpace(clauses)
    if space.nsym > _SYMBOL_BUDGET:
        raise ValueError(f"too many symbols for enumeration: {space.nsym}")
    props = _properties_of(logic)
    agents = space.agents
    props_tuple = tuple(props.get(a, ()) for a in agents)
    extra = {a: p for a, p in props.items() if a not in agents}
    for k in range(1, max_worlds + 1):
        for frame in _frame_list(k, props_tuple, connected):
            values = _solve_frame(space, frame, agents, k)
            if values is not None:
                return _build_model(space, frame, agents, k, values, extra)
    return None


def bounded_model_search(clauses, logic=None, max_worlds: int = 4, *,
                         force: bool = False) -> KripkeModel | None:
    """Exhaustive, deterministic search for a model of the clause set
    (every clause holding universally) whose relations satisfy the logic's
    frame properties.  Returns the first model in enumeration order, or
    None if there is no model within the bound."""
    return _search(clauses, logic, max_worlds, connected=False, force=force)


def bounded_clause_sat(clauses, logic=None, max_worlds: int = 4, *,
                       force: bool = False) -> bool:
    """Satisfiability-only variant of bounded_model_search.  Enumerates
    only frames whose worlds are all reachable from world 0 (a model with
    unreachable worlds restricts to one without them), which is much
    faster; the yes/no answer is identical."""
    return _search(clauses, logic, max_worlds, connected=True,
                   force=force) is not None


# ============================================================
# Bounded formula model search
# ============================================================

class _FormulaSpace:
    """Joint-valuation bitmasks for direct formula evaluation: one bit per
    assignment of all (world, symbol) pairs; bit (w * n + i) is symbol i at
    world w."""

    def __init__(self, symbols: list[str], k: int):
        self.symbols = symbols
        self.k = k
        n = len(symbols)
        bits = n * k
        if bits > _SYMBOL_BUDGET:
            raise ValueError(f"joint valuation space too large: {bits} bits")
        self.nbits = bits
        self.full = (1 << (1 << bits)) - 1
        self.index = {s: i for i, s in enumerate(symbols)}
        self._masks = []
        for b in range(bits):
            period = 1 << (b + 1)
            repeat = ((1 << (1 << bits)) - 1) // ((1 << period) - 1)
            block = (1 << (1 << b)) - 1
            self._masks.append(repeat * (block << (1 << b)))

    def var_mask(self, world: int, symbol: str) -> int:
        return self._masks[world * len(self.symbols) + self.index[symbol]]


def _formula_mask(space: _FormulaSpace, f: Formula, w: int,
                  succs: dict[int, tuple[int, ...]], memo: dict) -> int:
    key = (id(f), w)
    got = memo.get(key)
    if got is not None:
        return got
    if isinstance(f, TrueConst):
        out = space.full
    elif isinstance(f, FalseConst):
        out = 0
    elif isinstance(f, Start):
        out = space.full if w == 0 else 0
    elif isinstance(f, Prop):
        out = space.var_mask(w, f.name) if f.name in space.index else 0
    elif isinstance(f, Not):
        out = space.full ^ _formula_mask(space, f.body, w, succs, memo)
    elif isinstance(f, And):
        out = (_formula_mask(space, f.left, w, succs, memo)
               & _formula_mask(space, f.right, w, succs, memo))
    elif isinstance(f, Or):
        out = (_formula_mask(space, f.left, w, succs, memo)
               | _formula_mask(space, f.right, w, succs, memo))
    elif isinstance(f, Implies):
        out = ((space.full ^ _formula_mask(space, f.left, w, succs, memo))
               | _formula_mask(space, f.right, w, succs, memo))
    elif isinstance(f, Iff):
        out = space.full ^ (_formula_mask(space, f.left, w, succs, memo)
                            ^ _formula_mask(space, f.right, w, succs, memo))
    elif isinstance(f, Box):
        out = space.full
        row = succs.get(f.agent, (0,) * space.k)[w]
        m = row
        while m:
            low = m & -m
            m ^= low
            out &= _formula_mask(space, f.body, low.bit_length() - 1, succs, memo)
    elif isinstance(f, Dia):
        out = 0
        row = succs.get(f.agent, (0,) * space.k)[w]
        m = row
        while m:
            low = m & -m
            m ^= low
            out |= _formula_mask(space, f.body, low.bit_length() - 1, succs, memo)
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[key] = out
    return out


def find_formula_model(f: Formula, logic=None, max_worlds: int = 4, *,
                       force: bool = False,
                       connected: bool = False) -> KripkeModel | None:
    """Deterministic bounded search for a pointed model satisfying the
    formula at world 0, over frames of the logic's class."""
    from .formula import agents_of, prop_symbols

    if max_worlds > DEFAULT_WORLD_GUARD and not force:
        raise ValueError(
            f"enumeration beyond {DEFAULT_WORLD_GUARD} worlds must be forced")
    symbols = sorted(prop_symbols(f))
    props = _properties_of(logic)
    agents = sorted(agents_of(f))
    props_tuple = tuple(props.get(a, ()) for a in agents)
    extra = {a: p for a, p in props.items() if a not in agents}
    for k in range(1, max_worlds + 1):
        space = _FormulaSpace(symbols, k)
        for frame in _frame_list(k, props_tuple, connected):
            succs = dict(zip(agents, frame))
            mask = _formula_mask(space, f, 0, succs, {})
            if mask:
                joint = (mask & -mask).bit_length() - 1
                n = len(symbols)
                valuation = tuple(
                    frozenset(s for i, s in enumerate(symbols)
                              if joint >> (w * n + i) & 1)
                    for w in range(k))
                relations = {
                    a: frozenset((u, v) for u in range(k) for v in range(k)
                                 if rows[u] >> v & 1)
                    for a, rows in zip(agents, frame)}
                for a, p in sorted(extra.items()):
                    rows = _minimal_relation(k, p)
                    relations[a] = frozenset(
                        (u, v) for u in range(k) for v in range(k)
                        if rows[u] >> v & 1)
                return KripkeModel(k, relations, valuation)
    return None


def formula_satisfiable(f: Formula, logic=None, max_worlds: int = 4, *,
                        force: bool = False) -> bool:
    """Bounded formula satisfiability; enumerates connected frames only."""
    return find_formula_model(f, logic, max_worlds, force=force,
                              connected=True) is not None
