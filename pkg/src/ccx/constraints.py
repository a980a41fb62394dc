"""Size-bound membership constraints and their linear-arithmetic abstraction.

The ground term space is all ground terms whose symbol count stays within a
bound derived from a ground term beta. A constraint is a set of term atoms,
each read as "this term has ground instances inside the space". Satisfiability
and implication between constraints reduce to small integer systems with
positive coefficients, decided here exactly by bounded search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .terms import (
    App,
    Signature,
    Term,
    Var,
    is_ground,
    occ_count,
    size,
    term_key,
    vars_of,
)

# A constraint is a set of atom terms t, each read as t within the bound.
Constraint = frozenset


class EnumerationBudgetExceeded(Exception):
    """Raised when an exhaustive enumeration grows past its configured cap."""


@dataclass(frozen=True)
class Bound:
    """The ground term beta and its symbol count, fixing the term space."""

    beta: Term
    limit: int

    def __post_init__(self) -> None:
        if not is_ground(self.beta):
            raise ValueError("beta must be ground")
        if self.limit != size(self.beta):
            raise ValueError("limit must equal size(beta)")

    @classmethod
    def from_beta(cls, beta: Term) -> "Bound":
        return cls(beta, size(beta))


def leaf_constant(bound: Bound) -> Term:
    """Leftmost constant leaf of beta; a smallest ground term of the space."""
    t = bound.beta
    while isinstance(t, App) and t.args:
        t = t.args[0]
    return t


@dataclass(frozen=True)
class LinearConstraint:
    """sum(count * x) <= rhs with every variable implicitly >= 1."""

    coeffs: tuple[tuple[int, int], ...]  # (vid, count), sorted by vid
    rhs: int

    def min_lhs(self) -> int:
        return sum(c for _, c in self.coeffs)

    def holds(self, assignment: dict[int, int]) -> bool:
        return sum(c * assignment.get(v, 1) for v, c in self.coeffs) <= self.rhs


@lru_cache(maxsize=None)
def lic(atom: Term, bound: Bound) -> LinearConstraint:
    """Linear abstraction of the atom: occurrence counts against the slack.

    The right-hand side is limit - (size(atom) - total variable occurrences);
    a ground atom yields a variable-free system that holds iff its size fits.
    """
    vs = sorted(vars_of(atom))
    coeffs = tuple((v, occ_count(v, atom)) for v in vs)
    occ_total = sum(c for _, c in coeffs)
    return LinearConstraint(coeffs, bound.limit - (size(atom) - occ_total))


def satisfiable(gamma: Iterable[Term], bound: Bound) -> bool:
    """True iff mapping every variable to a constant satisfies every atom."""
    for a in gamma:
        la = lic(a, bound)
        if la.min_lhs() > la.rhs:
            return False
    return True


def _var_caps(premise: list[LinearConstraint], tvars: list[int], limit: int) -> dict[int, int]:
    # largest value each target variable can take while every premise atom
    # stays satisfiable with all other variables at their minimum 1
    caps = {v: limit for v in tvars}
    for p in premise:
        slack = p.rhs - p.min_lhs()
        for v, c in p.coeffs:
            if v in caps:
                caps[v] = min(caps[v], 1 + slack // c)
    return caps


def _violation_exists(
    premise: list[LinearConstraint], target: LinearConstraint, limit: int
) -> bool:
    # is there an assignment in the box [1, limit]^n satisfying the premise
    # but pushing the target's left-hand side past its right-hand side?
    if not target.coeffs:
        return target.rhs < 0
    tvars = [v for v, _ in target.coeffs]
    tset = set(tvars)
    coeff_of = dict(target.coeffs)

    # variables outside the target are pinned at 1, which only loosens the premise
    folded: list[tuple[dict[int, int], int]] = []
    for p in premise:
        keep = {v: c for v, c in p.coeffs if v in tset}
        rest = sum(c for v, c in p.coeffs if v not in tset)
        if keep:
            folded.append((keep, p.rhs - rest))

    caps = _var_caps(premise, tvars, limit)
    if any(caps[v] < 1 for v in tvars):
        return False  # premise forces an empty box
    order = sorted(tvars, key=lambda v: -coeff_of[v])

    def search(i: int, total: int, used: dict[int, int]) -> bool:
        if total + sum(coeff_of[v] * caps[v] for v in order[i:]) <= target.rhs:
            return False
        if i == len(order):
            return total > target.rhs
        v = order[i]
        for val in range(caps[v], 0, -1):
            used[v] = val
            feasible = True
            for keep, rhs in folded:
                if v not in keep:
                    continue
                lo = sum(c * used.get(w, 1) for w, c in keep.items())
                if lo > rhs:
                    feasible = False
                    break
            if feasible and search(i + 1, total + coeff_of[v] * val, used):
                return True
            del used[v]
        return False

    return search(0, 0, {})


def lia_implies(
    premise: list[LinearConstraint], conclusion: list[LinearConstraint], limit: int
) -> bool:
    """Every box assignment satisfying the premise satisfies the conclusion."""
    if any(p.min_lhs() > p.rhs for p in premise):
        return True
    return not any(_violation_exists(premise, t, limit) for t in conclusion)


def implies(gamma1: Iterable[Term], gamma2: Iterable[Term], bound: Bound) -> bool:
    """Constraint implication, decided through the linear abstraction.

    Quantification is universal over integer assignments >= 1; variables of
    gamma2 that do not occur in gamma1 are only constrained from below, so an
    atom mentioning them can hold for all assignments only if its slack allows
    the full box.
    """
    return _implies_cached(frozenset(gamma1), frozenset(gamma2), bound)


@lru_cache(maxsize=None)
def _implies_cached(gamma1: frozenset, gamma2: frozenset, bound: Bound) -> bool:
    premise = [lic(a, bound) for a in gamma1]
    conclusion = [lic(a, bound) for a in gamma2]
    return lia_implies(premise, conclusion, bound.limit)


@lru_cache(maxsize=None)
def occurrence_profile(t: Term) -> frozenset[tuple[int, int]]:
    return frozenset((v, occ_count(v, t)) for v in vars_of(t))


def reduce_atoms(gamma: Iterable[Term]) -> Constraint:
    """Drop atoms dominated by a same-profile atom of equal or larger size."""
    best: dict[frozenset, Term] = {}
    for a in gamma:
        prof = occurrence_profile(a)
        cur = best.get(prof)
        if cur is None or term_key(a) > term_key(cur):
            best[prof] = a
    return frozenset(best.values())


def enumerate_ground_terms(
    signature: Signature, bound: Bound, max_terms: int | None = None
) -> list[Term]:
    """All ground terms of size <= limit, in canonical order."""
    by_size: list[list[Term]] = [[] for _ in range(bound.limit + 1)]
    count = 0
    for n in range(1, bound.limit + 1):
        for sym in signature:
            if sym.arity == 0:
                if n == 1:
                    by_size[1].append(App(sym))
                    count += 1
                continue
            budget = n - 1
            if budget < sym.arity:
                continue
            # split the remaining size over the argument positions
            for split in _compositions(budget, sym.arity):
                for args in itertools.product(*(by_size[k] for k in split)):
                    by_size[n].append(App(sym, args))
                    count += 1
                    if max_terms is not None and count > max_terms:
                        raise EnumerationBudgetExceeded(
                            f"ground term enumeration exceeded {max_terms} terms"
                        )
    out = [t for row in by_size for t in row]
    out.sort(key=term_key)
    return out


def count_ground_terms(signature: Signature, bound: Bound) -> int:
    """Closed-form count of the enumeration, via size-indexed convolution."""
    counts = [0] * (bound.limit + 1)
    for n in range(1, bound.limit + 1):
        total = 0
        for sym in signature:
            if sym.arity == 0:
                total += 1 if n == 1 else 0
            elif n - 1 >= sym.arity:
                total += sum(
                    _product(counts[k] for k in split)
                    for split in _compositions(n - 1, sym.arity)
                )
        counts[n] = total
    return sum(counts)


def _compositions(total: int, parts: int):
    # all ways to write total as an ordered sum of `parts` positive integers
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _product(xs: Iterable[int]) -> int:
    out = 1
    for x in xs:
        out *= x
    return out
