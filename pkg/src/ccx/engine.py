"""The CC(X) saturation loop: merge, deduction, subsumption sweeps, queries.

Classes move through a worked-off/usable discipline. The selected class is
merged against every worked-off partner (and a renamed copy of itself), then
drives deductions in which every argument position draws a term pair from the
normal form of some worked-off class, at least one position using the selected
class. New classes are kept only while no existing class subsumes them by
matching; classes they subsume are retired.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Iterable

from .classes import (
    CongruenceClass,
    collapse_constraint_vars,
    condense,
    gnd,
    make_class,
    normalize,
    render_class,
    rename_class_apart,
)
from .constraints import Bound, satisfiable
from .ground import GroundPartition
from .subsumption import SymbolBitVector, find_subsumer, prefilter_bits, subsumes_by_matching
from .terms import (
    App,
    FreshVars,
    Signature,
    Term,
    Var,
    apply,
    is_ground,
    match,
    mgu,
    size,
    term_key,
    vars_of,
    vars_of_all,
)

EquationSet = list  # list[tuple[Term, Term]]


class _BudgetExhausted(Exception):
    pass


@dataclass
class Budget:
    """Cooperative limits for a saturation run; None means unlimited."""

    max_seconds: float | None = None
    max_steps: int | None = None
    _started: float = field(default_factory=time.perf_counter)
    _steps: int = 0

    def step(self) -> None:
        self._steps += 1

    def expired(self) -> bool:
        if self.max_steps is not None and self._steps >= self.max_steps:
            return True
        if self.max_seconds is not None:
            return time.perf_counter() - self._started >= self.max_seconds
        return False

    def check(self) -> None:
        if self.expired():
            raise _BudgetExhausted


@dataclass
class EngineStats:
    classes_created: int = 0
    merges: int = 0
    deductions: int = 0
    subsumptions: int = 0
    time_ms: int = 0


class TermIndex:
    """Two-tier retrieval index: exact-term map plus top-symbol buckets with
    per-class bit vectors backing the subsumption prefilter."""

    def __init__(self, signature: Signature) -> None:
        self.bit_of = {sym.name: i for i, sym in enumerate(signature)}
        self.by_term: dict[Term, set[int]] = {}
        self.by_top: dict[str, set[int]] = {}
        self.var_ids: set[int] = set()
        self.bits: dict[int, SymbolBitVector] = {}

    def add(self, cid: int, cls: CongruenceClass) -> None:
        for t in cls.terms:
            self.by_term.setdefault(t, set()).add(cid)
        for name in cls.top_symbols:
            self.by_top.setdefault(name, set()).add(cid)
        if cls.has_var_term:
            self.var_ids.add(cid)
        self.bits[cid] = SymbolBitVector.of(cls, self.bit_of)

    def remove(self, cid: int, cls: CongruenceClass) -> None:
        for t in cls.terms:
            ids = self.by_term.get(t)
            if ids:
                ids.discard(cid)
        for name in cls.top_symbols:
            ids = self.by_top.get(name)
            if ids:
                ids.discard(cid)
        self.var_ids.discard(cid)
        self.bits.pop(cid, None)

    def classes_of(self, t: Term) -> set[int]:
        return set(self.by_term.get(t, ()))

    def merge_candidates(self, cls: CongruenceClass) -> set[int]:
        """Ids of classes holding a term that may unify with a term of cls."""
        if cls.has_var_term:
            return {cid for ids in self.by_top.values() for cid in ids} | set(self.var_ids)
        out: set[int] = set(self.var_ids)
        for name in cls.top_symbols:
            out |= self.by_top.get(name, set())
        return out


class State:
    """One saturation state: queues, indexes, fresh variables, statistics."""

    def __init__(self, signature: Signature, bound: Bound) -> None:
        self.signature = signature
        self.bound = bound
        self.fresh = FreshVars()
        self.worked_off: dict[int, CongruenceClass] = {}
        self.usable: dict[int, CongruenceClass] = {}
        self.in_flight: dict[int, CongruenceClass] = {}
        self.index = TermIndex(signature)
        self.initial_single_ids: set[int] = set()
        self.stats = EngineStats()
        self._heap: list[tuple[tuple[int, int, int, int], int]] = []
        self._next_cid = 0
        # canonical renders of every rule result ever considered; identical
        # shapes share one subsumption verdict, so repeats are skipped
        self.seen_shapes: set[str] = set()

    def _priority(self, cid: int, cls: CongruenceClass) -> tuple[int, int, int, int]:
        # fewest terms, then most variables, then fewest separating variables
        return (len(cls.terms), -len(cls.term_vars), len(cls.sep_vars), cid)

    def push_usable(self, cls: CongruenceClass) -> int:
        cls = rename_class_apart(cls, (), self.fresh)
        cid = self._next_cid
        self._next_cid += 1
        self.usable[cid] = cls
        heapq.heappush(self._heap, (self._priority(cid, cls), cid))
        self.index.add(cid, cls)
        self.stats.classes_created += 1
        return cid

    def push_worked_off(self, cls: CongruenceClass) -> int:
        cls = rename_class_apart(cls, (), self.fresh)
        cid = self._next_cid
        self._next_cid += 1
        self.worked_off[cid] = cls
        self.index.add(cid, cls)
        self.stats.classes_created += 1
        return cid

    def retire(self, cid: int) -> None:
        for pool in (self.worked_off, self.usable, self.in_flight):
            cls = pool.pop(cid, None)
            if cls is not None:
                self.index.remove(cid, cls)
                return

    def live_items(self) -> list[tuple[int, CongruenceClass]]:
        items = list(self.worked_off.items()) + list(self.usable.items())
        items += list(self.in_flight.items())
        items.sort(key=lambda kv: kv[0])
        return items

    def alive(self, cid: int) -> bool:
        return cid in self.worked_off or cid in self.usable or cid in self.in_flight

    def final_classes(self) -> dict[int, CongruenceClass]:
        out = dict(self.worked_off)
        out.update(self.usable)
        out.update(self.in_flight)
        return out


def init_state(equations: EquationSet, signature: Signature, bound: Bound) -> State:
    """Initial state: one class per equation with ground instances in the
    space, plus one linear single-term class per signature symbol."""
    state = State(signature, bound)
    state.fresh.reserve(
        v for s, t in equations for v in vars_of(s) | vars_of(t)
    )
    for sym in signature:
        args = tuple(Var(state.fresh()) for _ in range(sym.arity))
        single = make_class([App(sym, args)])
        if satisfiable(single.constraint, bound):
            cid = state.push_worked_off(single)
            state.initial_single_ids.add(cid)
    for s, t in equations:
        if not satisfiable(frozenset((s, t)), bound):
            continue  # no ground instance inside the space
        state.push_usable(make_class([s, t]))
    return state


def select_next(state: State) -> tuple[int, CongruenceClass] | None:
    """Pop the usable class preferred by the selection heuristic."""
    while state._heap:
        _, cid = heapq.heappop(state._heap)
        cls = state.usable.pop(cid, None)
        if cls is not None:
            state.in_flight[cid] = cls
            return cid, cls
    return None


def _process_candidate(
    state: State,
    given_id: int,
    terms: Iterable[Term],
    atoms: Iterable[Term],
    rule: str,
    budget: Budget | None,
) -> bool:
    """Run a rule result through the subsumption discipline.

    Returns True when the backward sweep retired the given class itself, which
    aborts the rest of its turn (the new class is still kept).
    """
    if budget is not None:
        budget.check()
    candidate = make_class(terms, atoms)
    if not satisfiable(candidate.constraint, state.bound):
        return False
    if len(candidate.terms) == 1 and isinstance(candidate.terms[0], App):
        # an M-constrained singleton is an instance of its top symbol's
        # single-term class; always redundant
        state.stats.subsumptions += 1
        return False
    shape = render_class(candidate)
    if shape in state.seen_shapes:
        return False
    state.seen_shapes.add(shape)
    live = state.live_items()
    bits = SymbolBitVector.of(candidate, state.index.bit_of)
    # scan likely subsumers first: classes holding every candidate term
    # literally, then the rest newest-first
    supersets = set(state.index.classes_of(candidate.terms[0]))
    for t in candidate.terms[1:]:
        supersets &= state.index.classes_of(t)
        if not supersets:
            break
    ahead = [
        (cid, cls)
        for cid, cls in live
        if cid in supersets and prefilter_bits(state.index.bits[cid], bits)
    ]
    ahead += [
        (cid, cls)
        for cid, cls in sorted(live, reverse=True)
        if cid not in supersets and prefilter_bits(state.index.bits[cid], bits)
    ]
    if find_subsumer(candidate, ahead, state.bound) is not None:
        state.stats.subsumptions += 1
        return False
    given_died = False
    for cid, cls in live:
        if not state.alive(cid):
            continue
        if not prefilter_bits(bits, state.index.bits[cid]):
            continue
        if subsumes_by_matching(candidate, cls, state.bound):
            state.retire(cid)
            state.stats.subsumptions += 1
            if cid == given_id:
                given_died = True
    candidate = condense(candidate, state.bound, state.fresh)
    candidate = collapse_constraint_vars(candidate, state.fresh)
    state.seen_shapes.add(render_class(candidate))
    state.push_usable(candidate)
    if rule == "merge":
        state.stats.merges += 1
    else:
        state.stats.deductions += 1
    return given_died


def merge_step(
    state: State, given_id: int, given: CongruenceClass, budget: Budget | None = None
) -> bool:
    """All merges of the given class against worked-off partners and a renamed
    copy of itself. Returns True when the given class got subsumed away."""
    candidate_ids = state.index.merge_candidates(given)
    partners = [
        (cid, cls)
        for cid, cls in sorted(state.worked_off.items())
        if cid in candidate_ids
    ]
    partners.append((given_id, given))  # a class can merge with itself
    for pid, partner in partners:
        if pid != given_id and pid not in state.worked_off:
            continue  # retired by an earlier backward sweep
        left = rename_class_apart(given, (), state.fresh)
        right = rename_class_apart(partner, (), state.fresh)
        norm_left = normalize(left, state.fresh)
        norm_right = normalize(right, state.fresh)
        for i, s in enumerate(left.terms):
            for j, t in enumerate(right.terms):
                if pid == given_id and j < i:
                    continue  # self-merge pairs are symmetric
                mu = mgu(s, t)
                if mu is None:
                    continue
                terms = [apply(mu, u) for u in norm_left.terms + norm_right.terms]
                atoms = [
                    apply(mu, a) for a in norm_left.constraint | norm_right.constraint
                ]
                if _process_candidate(state, given_id, terms, atoms, "merge", budget):
                    return True
    return False


def deduction_step(
    state: State, given_id: int, given: CongruenceClass, budget: Budget | None = None
) -> bool:
    """All deductions through fresh single-term classes, argument positions
    drawing term pairs from normal forms of worked-off classes; at least one
    position must use the given class. Returns True when the given class got
    subsumed away."""
    limit = state.bound.limit
    partner_ids = sorted(state.worked_off) + [given_id]

    for sym in state.signature.non_constants():
        n = sym.arity
        if 1 + n > limit:
            continue
        copies: dict[tuple[int, int], CongruenceClass] = {}

        def copy_at(pos: int, cid: int) -> CongruenceClass:
            key = (pos, cid)
            if key not in copies:
                base = given if cid == given_id else state.worked_off[cid]
                copies[key] = normalize(
                    rename_class_apart(base, (), state.fresh), state.fresh
                )
            return copies[key]

        def rec(
            pos: int,
            used: bool,
            s_args: list[Term],
            t_args: list[Term],
            s_size: int,
            t_size: int,
            atoms: list[Term],
        ) -> bool:
            if budget is not None:
                budget.check()
            if pos == n:
                if not used:
                    return False
                u = App(sym, tuple(s_args))
                v = App(sym, tuple(t_args))
                return _process_candidate(
                    state, given_id, [u, v], atoms + [u, v], "deduction", budget
                )
            slack = n - pos - 1
            for cid in partner_ids:
                if cid != given_id and cid not in state.worked_off:
                    continue
                copy = copy_at(pos, cid)
                catoms = list(copy.constraint)
                for sp in copy.terms:
                    s_next = s_size + size(sp)
                    if 1 + s_next + slack > limit:
                        continue
                    for tp in copy.terms:
                        if pos == 0 and term_key(sp) > term_key(tp):
                            continue  # mirror combos build the same class
                        t_next = t_size + size(tp)
                        if 1 + t_next + slack > limit:
                            continue
                        if rec(
                            pos + 1,
                            used or cid == given_id,
                            s_args + [sp],
                            t_args + [tp],
                            s_next,
                            t_next,
                            atoms + catoms,
                        ):
                            return True
            return False

        if rec(0, False, [], [], 0, 0, []):
            return True
    return False


@dataclass
class SaturationResult:
    """Final classes plus run metadata; the object equality queries run on."""

    signature: Signature
    bound: Bound
    classes: dict[int, CongruenceClass]
    initial_single_ids: frozenset[int]
    stats: EngineStats
    completed: bool
    _norms: dict[int, CongruenceClass] = field(default_factory=dict, repr=False)

    @property
    def final_total(self) -> int:
        return len(self.classes)

    @property
    def final_nontrivial(self) -> int:
        """Final classes that are not still-initial single-term classes."""
        return sum(1 for cid in self.classes if cid not in self.initial_single_ids)

    def norm_of(self, cid: int) -> CongruenceClass:
        if cid not in self._norms:
            self._norms[cid] = normalize(self.classes[cid])
        return self._norms[cid]

    def dump(self) -> str:
        lines = [
            f"classes_created={self.stats.classes_created}",
            f"classes_final={self.final_total}",
            f"classes_final_nontrivial={self.final_nontrivial}",
            f"merges={self.stats.merges}",
            f"deductions={self.stats.deductions}",
            f"subsumptions={self.stats.subsumptions}",
            f"time_ms={self.stats.time_ms}",
        ]
        lines.extend(sorted(render_class(cls) for cls in self.classes.values()))
        return "\n".join(lines)


def saturate(state: State, budget: Budget | None = None) -> SaturationResult:
    """Run the worked-off/usable loop until no rule applies or the budget
    runs out; the result records which of the two happened."""
    started = time.perf_counter()
    completed = True
    while True:
        if budget is not None and budget.expired():
            completed = False
            break
        nxt = select_next(state)
        if nxt is None:
            break
        cid, cls = nxt
        if budget is not None:
            budget.step()
        try:
            died = merge_step(state, cid, cls, budget)
            if not died:
                died = deduction_step(state, cid, cls, budget)
        except _BudgetExhausted:
            completed = False
            break
        if not died and cid in state.in_flight:
            state.worked_off[cid] = state.in_flight.pop(cid)
        else:
            state.in_flight.pop(cid, None)
    state.stats.time_ms = int((time.perf_counter() - started) * 1000)
    return SaturationResult(
        signature=state.signature,
        bound=state.bound,
        classes=state.final_classes(),
        initial_single_ids=frozenset(state.initial_single_ids),
        stats=state.stats,
        completed=completed,
    )


def query_equal(result: SaturationResult, s: Term, t: Term) -> bool:
    """Are the two ground terms in the same congruence class?

    True iff some final class has normal-form terms matching s and t under one
    shared substitution whose instantiated constraint stays satisfiable.
    """
    for u in (s, t):
        if not is_ground(u):
            raise ValueError("equality queries take ground terms")
        if size(u) > result.bound.limit:
            raise ValueError("query term exceeds the bound")
    limit = result.bound.limit
    for cid in result.classes:
        norm = result.norm_of(cid)
        for s1 in norm.terms:
            m1 = match(s1, s)
            if m1 is None:
                continue
            for t1 in norm.terms:
                m2 = match(t1, t)
                if m2 is None:
                    continue
                if any(m1[v] != m2[v] for v in m1.keys() & m2.keys()):
                    continue
                combined = dict(m1)
                combined.update(m2)
                if all(size(apply(combined, a)) <= limit for a in norm.constraint):
                    return True
    return False


def ground_partition(
    result: SaturationResult, budget: int = 10**6
) -> GroundPartition:
    """Partition of the bounded ground term space induced by query_equal."""
    from .constraints import enumerate_ground_terms

    universe = enumerate_ground_terms(result.signature, result.bound, max_terms=budget)
    part = GroundPartition(universe)
    for cid in result.classes:
        for block in gnd(result.classes[cid], result.signature, result.bound, budget):
            members = sorted(block, key=term_key)
            for a, b in zip(members, members[1:]):
                part.union_terms(a, b)
    return part
