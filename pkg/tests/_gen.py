"""Seeded random generators shared across the test modules."""

from __future__ import annotations

import random

from ccx import App, Signature, Symbol, Term, Var, build_beta, make_class
from ccx.classes import CongruenceClass, rename_class_apart
from ccx.constraints import Bound, count_ground_terms
from ccx.terms import apply


def rand_signature(rng: random.Random, max_funcs: int = 3, max_consts: int = 2) -> Signature:
    syms = [Symbol("fgh"[i], rng.choice([1, 1, 2])) for i in range(rng.randint(1, max_funcs))]
    syms += [Symbol("ab"[i], 0) for i in range(rng.randint(1, max_consts))]
    rng.shuffle(syms)
    return Signature(tuple(syms))


def rand_term(sig: Signature, rng: random.Random, max_depth: int, vids: list[int]) -> Term:
    if vids and rng.random() < 0.35:
        return Var(rng.choice(vids))
    pool = [s for s in sig if max_depth > 0 or s.arity == 0] or sig.constants()
    sym = rng.choice(pool)
    if sym.arity == 0:
        return App(sym)
    return App(sym, tuple(rand_term(sig, rng, max_depth - 1, vids) for _ in range(sym.arity)))


def rand_instance(
    rng: random.Random, max_terms: int = 200, max_eqs: int = 3
) -> tuple[Signature, Bound, list[tuple[Term, Term]]] | None:
    """One random problem instance, or None when its term space is too big."""
    sig = rand_signature(rng)
    bound = build_beta(sig, rng.randint(1, 3))
    if count_ground_terms(sig, bound) > max_terms:
        return None
    eqs = []
    for _ in range(rng.randint(1, max_eqs)):
        vids = list(range(rng.randint(0, 3)))
        eqs.append((rand_term(sig, rng, 2, vids), rand_term(sig, rng, 2, vids)))
    return sig, bound, eqs


def rand_class(sig: Signature, rng: random.Random, vids: list[int] | None = None) -> CongruenceClass:
    vids = vids if vids is not None else list(range(rng.randint(0, 3)))
    return make_class([rand_term(sig, rng, 2, vids) for _ in range(rng.randint(1, 3))])


def rand_class_pair(
    rng: random.Random, max_terms: int = 150
) -> tuple[Signature, Bound, CongruenceClass, CongruenceClass] | None:
    """A (general, instance) candidate pair; half the time the instance is a
    substitution instance of the general class, so subsumption fires often."""
    syms = [Symbol("f", rng.choice([1, 2])), Symbol("g", 1), Symbol("a", 0)]
    if rng.random() < 0.5:
        syms.append(Symbol("b", 0))
    sig = Signature(tuple(syms))
    bound = build_beta(sig, rng.randint(2, 3))
    if count_ground_terms(sig, bound) > max_terms:
        return None
    vids = [0, 1, 2]
    general = rand_class(sig, rng, vids)
    if rng.random() < 0.5:
        sub = {v: rand_term(sig, rng, 1, [5, 6]) for v in vids}
        terms = [apply(sub, t) for t in general.terms]
        if rng.random() < 0.4 and len(terms) > 1:
            terms = terms[:-1]
        instance = make_class(terms)
    else:
        instance = rand_class(sig, rng, [5, 6])
    instance = rename_class_apart(instance, general.all_vars | instance.all_vars)
    return sig, bound, general, instance
