"""Constrained congruence classes and their grounding semantics.

A class is a set of terms sharing one constraint. Separating variables occur
in every term and split the class into distinct ground classes; the remaining
free variables range inside a single ground class. The `gnd` function realizes
that two-stage semantics by exhaustive enumeration and is meant as a
desk-scale oracle, never as a production path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .constraints import (
    Bound,
    Constraint,
    EnumerationBudgetExceeded,
    lic,
    occurrence_profile,
    reduce_atoms,
)
from .terms import (
    App,
    FreshVars,
    Signature,
    Term,
    Var,
    apply,
    render_term,
    size,
    term_key,
    vars_of,
    vars_of_all,
)


@dataclass(frozen=True)
class CongruenceClass:
    """Finite nonempty term set with one shared constraint."""

    terms: tuple[Term, ...]
    constraint: Constraint

    @cached_property
    def sep_vars(self) -> frozenset[int]:
        out = vars_of(self.terms[0])
        for t in self.terms[1:]:
            out &= vars_of(t)
        return out

    @cached_property
    def free_vars(self) -> frozenset[int]:
        return self.term_vars - self.sep_vars

    @cached_property
    def term_vars(self) -> frozenset[int]:
        return vars_of_all(self.terms)

    @cached_property
    def all_vars(self) -> frozenset[int]:
        return self.term_vars | vars_of_all(self.constraint)

    @cached_property
    def top_symbols(self) -> frozenset[str]:
        return frozenset(t.sym.name for t in self.terms if isinstance(t, App))

    @cached_property
    def has_var_term(self) -> bool:
        return any(isinstance(t, Var) for t in self.terms)

    def __repr__(self) -> str:
        return render_class(self)


def make_class(terms: Iterable[Term], extra_atoms: Iterable[Term] = ()) -> CongruenceClass:
    """Build a class whose constraint covers its own terms plus extra atoms."""
    ts = sorted(set(terms), key=term_key)
    if not ts:
        raise ValueError("a congruence class needs at least one term")
    atoms = reduce_atoms(set(ts) | set(extra_atoms))
    return CongruenceClass(tuple(ts), atoms)


def separating_free_vars(cls: CongruenceClass) -> tuple[frozenset[int], frozenset[int]]:
    """(X, Y): variables in every term vs the remaining term variables."""
    return cls.sep_vars, cls.free_vars


def rename_class(cls: CongruenceClass, mapping: Mapping[int, int]) -> CongruenceClass:
    subst = {v: Var(w) for v, w in mapping.items()}
    return CongruenceClass(
        tuple(sorted((apply(subst, t) for t in cls.terms), key=term_key)),
        frozenset(apply(subst, a) for a in cls.constraint),
    )


def rename_class_apart(
    cls: CongruenceClass, reserved: Iterable[int], gen: FreshVars | None = None
) -> CongruenceClass:
    vs = sorted(cls.all_vars)
    if gen is None:
        start = max(set(reserved) | set(vs), default=-1) + 1
        mapping = {v: start + i for i, v in enumerate(vs)}
    else:
        mapping = {v: gen() for v in vs}
    return rename_class(cls, mapping)


def normalize(cls: CongruenceClass, gen: FreshVars | None = None) -> CongruenceClass:
    """Add one freshly renamed copy of every term containing free variables.

    One renaming covers all free variables, so copies of different terms stay
    consistent on shared free variables. The constraint is extended with its
    own renamed copy; the grounding semantics is unchanged.
    """
    free = cls.free_vars
    if not free:
        return cls
    if gen is None:
        start = max(cls.all_vars) + 1
        mapping = {v: start + i for i, v in enumerate(sorted(free))}
    else:
        mapping = {v: gen() for v in sorted(free)}
    subst = {v: Var(w) for v, w in mapping.items()}
    terms = list(cls.terms) + [apply(subst, t) for t in cls.terms if vars_of(t) & free]
    atoms = set(cls.constraint) | {apply(subst, a) for a in cls.constraint}
    return make_class(terms, atoms)


def m_constrained(cls: CongruenceClass) -> bool:
    """Every term's membership atom is present or dominated in the constraint.

    Atom reduction may replace a term's own atom by a same-profile atom of
    equal or larger size, which implies it.
    """
    for t in cls.terms:
        if t in cls.constraint:
            continue
        prof = occurrence_profile(t)
        if not any(
            occurrence_profile(a) == prof and size(a) >= size(t) for a in cls.constraint
        ):
            return False
    return True


def _atoms_ok(atoms: Iterable[Term], subst: Mapping[int, Term], limit: int) -> bool:
    # after the partial grounding, every atom must still fit the bound with
    # its remaining variables counted as size-1 terms
    return all(size(apply(subst, a)) <= limit for a in atoms)


def _value_cap(vid: int, atoms: Iterable[Term], bound: Bound) -> int:
    cap = bound.limit
    for a in atoms:
        la = lic(a, bound)
        for v, c in la.coeffs:
            if v == vid:
                cap = min(cap, 1 + (la.rhs - la.min_lhs()) // c)
    return cap


def gnd(
    cls: CongruenceClass,
    signature: Signature,
    bound: Bound,
    budget: int = 10**6,
) -> frozenset[frozenset[Term]]:
    """Ground-class family: split on separating variables, then flood the rest.

    Oracle-grade exhaustive enumeration over the bounded term space; exact for
    classes whose term variables all occur in the constraint (any class built
    by `make_class` qualifies). Raises EnumerationBudgetExceeded rather than
    truncating.
    """
    from .constraints import enumerate_ground_terms

    ground = enumerate_ground_terms(signature, bound, max_terms=budget)
    by_size: dict[int, list[Term]] = {}
    for g in ground:
        by_size.setdefault(size(g), []).append(g)

    def candidates(vid: int) -> list[Term]:
        cap = _value_cap(vid, cls.constraint, bound)
        return [g for s in range(1, cap + 1) for g in by_size.get(s, [])]

    ticks = 0

    def tick() -> None:
        nonlocal ticks
        ticks += 1
        if ticks > budget:
            raise EnumerationBudgetExceeded(
                f"grounding enumeration exceeded {budget} assignments"
            )

    xs = sorted(cls.sep_vars)
    atoms = sorted(cls.constraint, key=term_key)
    blocks: set[frozenset[Term]] = set()
    for xvals in itertools.product(*(candidates(v) for v in xs)):
        tick()
        sigma = dict(zip(xs, xvals))
        if not _atoms_ok(atoms, sigma, bound.limit):
            continue
        block: set[Term] = set()
        for t in cls.terms:
            rest = sorted(vars_of(t) - cls.sep_vars)
            for yvals in itertools.product(*(candidates(v) for v in rest)):
                tick()
                full = dict(sigma)
                full.update(zip(rest, yvals))
                if _atoms_ok(atoms, full, bound.limit):
                    block.add(apply(full, t))
        if block:
            blocks.add(frozenset(block))
    return frozenset(blocks)


def gnd_subsumes(
    general: CongruenceClass,
    instance: CongruenceClass,
    signature: Signature,
    bound: Bound,
    budget: int = 10**6,
) -> bool:
    """Ground-level subsumption: every ground class of the instance sits
    inside some ground class of the general class. Oracle only."""
    gb = gnd(general, signature, bound, budget)
    return all(any(a <= b for b in gb) for a in gnd(instance, signature, bound, budget))


def condense(
    cls: CongruenceClass, bound: Bound, gen: FreshVars | None = None
) -> CongruenceClass:
    """Drop terms that are instances of other terms when the reduced class
    still subsumes the original; returns the fixpoint."""
    from .subsumption import subsumes_by_matching
    from .terms import match

    cur = cls
    changed = True
    while changed and len(cur.terms) > 1:
        changed = False
        for i, gen_term in enumerate(cur.terms):
            for j, inst_term in enumerate(cur.terms):
                if i == j:
                    continue
                delta = match(gen_term, inst_term)
                if delta is None:
                    continue
                kept = [t for k, t in enumerate(cur.terms) if k != j]
                candidate = make_class(
                    (apply(delta, t) for t in kept),
                    (apply(delta, a) for a in cur.constraint),
                )
                probe = rename_class_apart(candidate, cur.all_vars, gen)
                if subsumes_by_matching(probe, cur, bound):
                    cur = candidate
                    changed = True
                    break
            if changed:
                break
    return cur


def collapse_constraint_vars(
    cls: CongruenceClass, gen: FreshVars | None = None
) -> CongruenceClass:
    """Map variables occurring only in the constraint to one shared fresh
    variable; the grounding semantics is preserved."""
    extra = cls.all_vars - cls.term_vars
    if not extra:
        return cls
    fresh = gen() if gen is not None else max(cls.all_vars) + 1
    subst = {v: Var(fresh) for v in extra}
    return make_class(cls.terms, (apply(subst, a) for a in cls.constraint))


def render_class(cls: CongruenceClass) -> str:
    """Paper-style shorthand "{atoms ∥ terms}" with canonical variable names."""
    names: dict[int, str] = {}

    def visit(t: Term) -> None:
        if isinstance(t, Var):
            if t.vid not in names:
                names[t.vid] = f"x{len(names)}"
        else:
            for a in t.args:
                visit(a)

    atoms = sorted(cls.constraint, key=term_key)
    for t in cls.terms:
        visit(t)
    for a in atoms:
        visit(a)
    left = ", ".join(render_term(a, names) for a in atoms)
    right = ", ".join(render_term(t, names) for t in cls.terms)
    return "{" + left + " ∥ " + right + "}"
