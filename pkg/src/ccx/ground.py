"""Ground congruence closure over an enumerated term universe.

Two independent routes to the same partition: `cc_saturate` is the production
baseline (union-find plus a congruence signature table with a pending-union
worklist), while `eq_closure` is a naive fixpoint of the equational inference
rules, kept deliberately separate as a cross-check oracle.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .constraints import Bound, EnumerationBudgetExceeded, lic
from .terms import App, Signature, Term, apply, size, term_key, vars_of


class GroundPartition:
    """Union-find over an indexed universe of ground terms."""

    def __init__(self, universe: Iterable[Term]) -> None:
        self.universe: list[Term] = sorted(set(universe), key=term_key)
        self.index: dict[Term, int] = {t: i for i, t in enumerate(self.universe)}
        self._parent = list(range(len(self.universe)))
        self._size = [1] * len(self.universe)

    def find(self, i: int) -> int:
        parent = self._parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self._size[ri] < self._size[rj]:
            ri, rj = rj, ri
        self._parent[rj] = ri
        self._size[ri] += self._size[rj]
        return True

    def union_terms(self, s: Term, t: Term) -> bool:
        return self.union(self.index[s], self.index[t])

    def same(self, s: Term, t: Term) -> bool:
        return self.find(self.index[s]) == self.find(self.index[t])

    def blocks(self) -> list[list[Term]]:
        grouped: dict[int, list[Term]] = {}
        for i, t in enumerate(self.universe):
            grouped.setdefault(self.find(i), []).append(t)
        out = [sorted(block, key=term_key) for block in grouped.values()]
        out.sort(key=lambda block: term_key(block[0]))
        return out

    @property
    def blocks_total(self) -> int:
        return len({self.find(i) for i in range(len(self.universe))})

    @property
    def blocks_nonsingleton(self) -> int:
        return sum(1 for b in self.blocks() if len(b) > 1)

    def key(self) -> frozenset[frozenset[Term]]:
        """Structural identity of the partition, for exact comparisons."""
        return frozenset(frozenset(b) for b in self.blocks())

    def dump(self, time_ms: int = 0) -> str:
        lines = [
            f"blocks_total={self.blocks_total}",
            f"blocks_nonsingleton={self.blocks_nonsingleton}",
            f"time_ms={time_ms}",
        ]
        for block in self.blocks():
            lines.append("{" + ", ".join(repr(t) for t in block) + "}")
        return "\n".join(lines)


def ground_equations(
    equations: Iterable[tuple[Term, Term]],
    signature: Signature,
    bound: Bound,
    budget: int = 10**6,
    tick: Callable[[], None] | None = None,
) -> list[tuple[Term, Term]]:
    """All instances of the equations with both sides inside the term space."""
    from .constraints import enumerate_ground_terms

    ground = enumerate_ground_terms(signature, bound, max_terms=budget)
    by_size: dict[int, list[Term]] = {}
    for g in ground:
        by_size.setdefault(size(g), []).append(g)

    out: list[tuple[Term, Term]] = []
    seen: set[tuple[Term, Term]] = set()
    count = 0
    for lhs, rhs in equations:
        vs = sorted(vars_of(lhs) | vars_of(rhs))
        caps = {v: _cap(v, (lhs, rhs), bound) for v in vs}
        if any(caps[v] < 1 for v in vs):
            continue

        def assign(i: int, subst: dict[int, Term]) -> None:
            nonlocal count
            count += 1
            if count > budget:
                raise EnumerationBudgetExceeded(
                    f"ground instance enumeration exceeded {budget} assignments"
                )
            if tick is not None:
                tick()
            ls, rs = apply(subst, lhs), apply(subst, rhs)
            if size(ls) > bound.limit or size(rs) > bound.limit:
                return
            if i == len(vs):
                pair = (ls, rs)
                if pair not in seen:
                    seen.add(pair)
                    out.append(pair)
                return
            v = vs[i]
            for s in range(1, caps[v] + 1):
                for g in by_size.get(s, []):
                    subst[v] = g
                    assign(i + 1, subst)
                    del subst[v]

        assign(0, {})
    return out


def _cap(vid: int, sides: tuple[Term, Term], bound: Bound) -> int:
    cap = bound.limit
    for side in sides:
        la = lic(side, bound)
        for v, c in la.coeffs:
            if v == vid:
                cap = min(cap, 1 + (la.rhs - la.min_lhs()) // c)
    return cap


def cc_saturate(
    universe: Iterable[Term],
    equations: Iterable[tuple[Term, Term]],
    tick: Callable[[], None] | None = None,
) -> GroundPartition:
    """Congruence closure of the equations restricted to the universe.

    Union-find plus a signature table mapping (symbol, child representatives)
    to a representative term; merges re-canonicalize the parents of the
    absorbed class through a pending queue.
    """
    part = GroundPartition(universe)
    idx = part.index
    n = len(part.universe)

    parents: list[list[int]] = [[] for _ in range(n)]
    for i, t in enumerate(part.universe):
        if isinstance(t, App):
            for a in t.args:
                parents[idx[a]].append(i)

    def sig_key(i: int) -> tuple:
        t = part.universe[i]
        return (t.sym.name, tuple(part.find(idx[a]) for a in t.args))

    table: dict[tuple, int] = {}
    pending: list[tuple[int, int]] = []
    for i, t in enumerate(part.universe):
        if isinstance(t, App) and t.args:
            key = sig_key(i)
            other = table.get(key)
            if other is None:
                table[key] = i
            else:
                pending.append((i, other))

    class_parents: dict[int, list[int]] = {
        part.find(i): list(ps) for i, ps in enumerate(parents) if ps
    }

    for s, t in equations:
        if s not in idx or t not in idx:
            raise ValueError("equation term outside the universe")
        pending.append((idx[s], idx[t]))

    steps = 0
    while pending:
        a, b = pending.pop()
        ra, rb = part.find(a), part.find(b)
        if ra == rb:
            continue
        if tick is not None:
            steps += 1
            if steps % 256 == 0:
                tick()
        pa = class_parents.pop(ra, [])
        pb = class_parents.pop(rb, [])
        part.union(ra, rb)
        root = part.find(ra)
        # parents of the class that lost its representative re-enter the table
        for p in pb if root == ra else pa:
            key = sig_key(p)
            other = table.get(key)
            if other is None:
                table[key] = p
            elif part.find(other) != part.find(p):
                pending.append((p, other))
        if pa or pb:
            class_parents[root] = pa + pb
    return part


def eq_closure(
    universe: Iterable[Term],
    equations: Iterable[tuple[Term, Term]],
    tick: Callable[[], None] | None = None,
) -> GroundPartition:
    """Least fixpoint of reflexivity/symmetry/transitivity/congruence over the
    universe, computed naively; the cross-check oracle for `cc_saturate`."""
    terms = sorted(set(universe), key=term_key)
    loc: dict[Term, int] = {t: i for i, t in enumerate(terms)}
    blocks: list[set[Term]] = [{t} for t in terms]

    def merge(u: Term, v: Term) -> bool:
        bu, bv = loc[u], loc[v]
        if bu == bv:
            return False
        if len(blocks[bu]) < len(blocks[bv]):
            bu, bv = bv, bu
        for w in blocks[bv]:
            loc[w] = bu
        blocks[bu] |= blocks[bv]
        blocks[bv] = set()
        return True

    for s, t in equations:
        if s not in loc or t not in loc:
            raise ValueError("equation term outside the universe")
        merge(s, t)

    grouped: dict[str, list[Term]] = {}
    for t in terms:
        if isinstance(t, App) and t.args:
            grouped.setdefault(t.sym.name, []).append(t)

    changed = True
    while changed:
        changed = False
        if tick is not None:
            tick()
        for group in grouped.values():
            for i, u in enumerate(group):
                for v in group[i + 1 :]:
                    if loc[u] == loc[v]:
                        continue
                    if all(loc[a] == loc[b] for a, b in zip(u.args, v.args)):
                        merge(u, v)
                        changed = True

    part = GroundPartition(terms)
    for block in blocks:
        block_list = sorted(block, key=term_key)
        for u, v in zip(block_list, block_list[1:]):
            part.union_terms(u, v)
    return part
