"""Class subsumption by matching, with top-symbol prefilters.

The implementable test: choose one substitution on the general class's
separating variables, then match every instance term against some general
term, checking that the instance constraint implies the instantiated general
constraint. Sound but incomplete with respect to ground subsumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .classes import CongruenceClass
from .constraints import Bound, leaf_constant, implies
from .terms import App, Term, apply, match, vars_of


@dataclass(frozen=True)
class SymbolBitVector:
    """One bit per signature symbol (set iff some class term has that top
    symbol) plus a flag for classes containing a bare variable term."""

    bits: int
    has_var_term: bool

    @classmethod
    def of(cls, c: CongruenceClass, bit_of: Mapping[str, int]) -> "SymbolBitVector":
        bits = 0
        for name in c.top_symbols:
            bits |= 1 << bit_of[name]
        return cls(bits, c.has_var_term)


def prefilter_bits(general: SymbolBitVector, instance: SymbolBitVector) -> bool:
    if general.has_var_term:
        return True
    if instance.has_var_term:
        return False
    return (~general.bits & instance.bits) == 0


def prefilter(general: CongruenceClass, instance: CongruenceClass) -> bool:
    """False only when subsumption is impossible: some instance top symbol has
    no potential generalization. Classes with a variable term on the general
    side always pass."""
    if general.has_var_term:
        return True
    if instance.has_var_term:
        return False
    return instance.top_symbols <= general.top_symbols


def _instantiated_atoms(
    atoms: Iterable[Term], subst: Mapping[int, Term], rigid: frozenset[int], filler: Term
) -> frozenset[Term]:
    # variables the match left open stand for arbitrary members of the space;
    # a smallest ground term witnesses them
    out = set()
    for a in atoms:
        a = apply(subst, a)
        residual = vars_of(a) - rigid
        if residual:
            a = apply({v: filler for v in residual}, a)
        out.add(a)
    return frozenset(out)


def _covers_all_terms(
    general: CongruenceClass,
    instance: CongruenceClass,
    sigma: dict[int, Term],
    bound: Bound,
) -> bool:
    rigid = instance.all_vars
    filler = leaf_constant(bound)
    base = [apply(sigma, a) for a in general.constraint]
    general_insts = [(t0, apply(sigma, t0)) for t0 in general.terms]
    for t1 in instance.terms:
        found = False
        for t0, t0s in general_insts:
            if (
                isinstance(t0s, App)
                and (not isinstance(t1, App) or t0s.sym != t1.sym)
            ):
                continue
            delta = match(t0s, t1, frozen=rigid)
            if delta is None:
                continue
            inst = _instantiated_atoms(base, delta, rigid, filler)
            if implies(instance.constraint, inst, bound):
                found = True
                break
        if not found:
            return False
    return True


def subsumes_by_matching(
    general: CongruenceClass, instance: CongruenceClass, bound: Bound
) -> bool:
    """Does the general class subsume the instance class by matching?

    The classes must be variable-disjoint; rename beforehand. Candidate
    substitutions on the separating variables are read off term-against-term
    matchers with free-variable bindings stripped; per instance term, the
    first general term whose match and constraint implication both succeed
    wins.
    """
    if general.all_vars & instance.all_vars:
        raise ValueError("subsumption requires variable-disjoint classes")
    if not general.sep_vars:
        return _covers_all_terms(general, instance, {}, bound)
    sep = general.sep_vars
    for t0 in general.terms:
        for t1 in instance.terms:
            if (
                isinstance(t0, App)
                and (not isinstance(t1, App) or t0.sym != t1.sym)
            ):
                continue
            m = match(t0, t1)
            if m is None:
                continue
            sigma = {v: u for v, u in m.items() if v in sep}
            if _covers_all_terms(general, instance, sigma, bound):
                return True
    return False


def find_subsumer(
    instance: CongruenceClass,
    candidates: Iterable[tuple[int, CongruenceClass]],
    bound: Bound,
) -> int | None:
    """First candidate class id that subsumes the instance by matching."""
    for cid, general in candidates:
        if prefilter(general, instance) and subsumes_by_matching(general, instance, bound):
            return cid
    return None
