"""Tests for congruence classes, normal forms and the grounding oracle."""

import random

import pytest

from ccx.classes import (
    collapse_constraint_vars,
    condense,
    gnd,
    m_constrained,
    make_class,
    normalize,
    render_class,
    rename_class_apart,
    separating_free_vars,
)
from ccx.constraints import Bound, EnumerationBudgetExceeded, count_ground_terms
from ccx.frontend import build_beta
from ccx.terms import App, Signature, Symbol, Var, apply, match, size, vars_of

from _gen import rand_class, rand_signature, rand_term

f = Symbol("f", 1)
g = Symbol("g", 1)
h = Symbol("h", 1)
a = Symbol("a", 0)
b = Symbol("b", 0)
x, y, z = Var(0), Var(1), Var(2)
A, B = App(a), App(b)

# the two-constant signature of the grounding example
SIG2 = Signature((g, h, a, b))
BOUND2 = Bound.from_beta(g(A))


def test_make_class():
    c = make_class([g(x), h(x)])
    assert set(c.terms) == {g(x), h(x)}
    assert m_constrained(c)

    c = make_class([A])
    assert c.terms == (A,) and c.constraint == frozenset((A,))

    single = make_class([f(Var(7))])
    assert single.terms == (f(Var(7)),)
    assert m_constrained(single)

    with pytest.raises(ValueError):
        make_class([])


def test_separating_free_vars():
    sx, fx = separating_free_vars(make_class([g(x), h(x)]))
    assert sx == {0} and fx == set()

    sx, fx = separating_free_vars(make_class([g(x), h(y)]))
    assert sx == set() and fx == {0, 1}

    sx, fx = separating_free_vars(make_class([A]))
    assert sx == set() and fx == set()


def test_normalize():
    c = make_class([g(x), h(y)])
    n = normalize(c)
    assert len(n.terms) == 4
    shapes = sorted(t.sym.name for t in n.terms)
    assert shapes == ["g", "g", "h", "h"]

    c = make_class([g(x), h(x)])
    assert normalize(c) == c

    c = make_class([A, f(y)])
    n = normalize(c)
    assert len(n.terms) == 3  # one renamed copy of f(y) only
    assert A in n.terms


def test_normalize_shares_one_renaming():
    # copies of different terms stay consistent on shared free variables
    c = make_class([App(Symbol("p", 2), (x, y)), g(y), h(z)])
    n = normalize(c)
    copies = [t for t in n.terms if t not in c.terms]
    pairs = [t for t in copies if isinstance(t, App) and t.sym.name == "p"]
    gs = [t for t in copies if isinstance(t, App) and t.sym.name == "g"]
    assert pairs and gs
    assert pairs[0].args[1] == gs[0].args[0]


def test_gnd_paper_example():
    cls_a = make_class([g(x), h(x)])
    assert gnd(cls_a, SIG2, BOUND2) == frozenset(
        (frozenset((g(A), h(A))), frozenset((g(B), h(B))))
    )

    cls_b = make_class([g(x), h(y)])
    assert gnd(cls_b, SIG2, BOUND2) == frozenset(
        (frozenset((g(A), g(B), h(A), h(B))),)
    )

    assert gnd(make_class([A]), SIG2, BOUND2) == frozenset((frozenset((A,)),))


def test_gnd_unsatisfiable_is_empty():
    tall = g(g(g(A)))
    assert gnd(make_class([tall]), SIG2, BOUND2) == frozenset()


def test_gnd_budget():
    sig = Signature((a, f, g))
    bound = build_beta(sig, 4)
    cls = make_class([g(x), h(y)]) if False else make_class([f(x), g(y)])
    with pytest.raises(EnumerationBudgetExceeded):
        gnd(cls, sig, bound, budget=5)


def test_condense_examples():
    bound = build_beta(Signature((a, f)), 3)
    c = make_class([f(x), f(y), f(z)])
    got = condense(c, bound)
    assert len(got.terms) == 2

    c = make_class([g(x), h(x)])
    assert condense(c, build_beta(SIG2, 2)) == c


def test_condense_mixed_ground_checked_by_oracle():
    # whether f(a) may be dropped from {f(x), f(a)} is decided by subsumption;
    # the oracle only demands gnd-equivalence of the result
    sig = Signature((a, b, f))
    bound = build_beta(sig, 2)
    c = make_class([f(x), f(A)])
    got = condense(c, bound)
    assert gnd(got, sig, bound) == gnd(c, sig, bound)


def test_collapse_constraint_vars():
    u, v = Var(8), Var(9)
    c = make_class([A], extra_atoms=[f(u), g(v)])
    got = collapse_constraint_vars(c)
    cvars = vars_of_constraint(got)
    assert len(cvars) == 1

    c = make_class([g(x), h(x)])
    assert collapse_constraint_vars(c) == c

    c = make_class([A], extra_atoms=[f(u)])
    got = collapse_constraint_vars(c)
    assert len(vars_of_constraint(got)) == 1


def vars_of_constraint(cls):
    out = set()
    for atom in cls.constraint:
        out |= vars_of(atom)
    return out


def test_transformers_preserve_gnd():
    rng = random.Random(12)
    checked = 0
    for _ in range(120):
        sig = rand_signature(rng)
        bound = build_beta(sig, rng.randint(1, 2))
        if count_ground_terms(sig, bound) > 60:
            continue
        cls = rand_class(sig, rng)
        base = gnd(cls, sig, bound)
        assert gnd(normalize(cls), sig, bound) == base
        assert gnd(condense(cls, bound), sig, bound) == base
        extra = make_class(cls.terms, list(cls.constraint) + [rand_term(sig, rng, 1, [9])])
        assert gnd(collapse_constraint_vars(extra), sig, bound) == gnd(extra, sig, bound)
        checked += 1
    assert checked > 40


def test_m_constrained_after_transformers():
    rng = random.Random(13)
    for _ in range(150):
        sig = rand_signature(rng)
        bound = build_beta(sig, 2)
        cls = rand_class(sig, rng)
        assert m_constrained(cls)
        assert m_constrained(normalize(cls))
        assert m_constrained(condense(cls, bound))
        assert m_constrained(collapse_constraint_vars(cls))


def test_var_caches_match_recomputation():
    rng = random.Random(14)
    for _ in range(150):
        sig = rand_signature(rng)
        cls = rand_class(sig, rng)
        sep = frozenset.intersection(*(vars_of(t) for t in cls.terms))
        allv = frozenset.union(*(vars_of(t) for t in cls.terms))
        assert cls.sep_vars == sep
        assert cls.free_vars == allv - sep


def test_normal_class_pair_property():
    # a ground pair lies in one ground class iff one substitution embeds both
    # terms into the normal class with a satisfiable constraint
    rng = random.Random(15)
    checked = 0
    for _ in range(60):
        sig = rand_signature(rng)
        bound = build_beta(sig, rng.randint(1, 2))
        if count_ground_terms(sig, bound) > 40:
            continue
        cls = rand_class(sig, rng)
        blocks = gnd(cls, sig, bound)
        ground = sorted({t for blk in blocks for t in blk}, key=str)
        norm = normalize(cls)
        limit = bound.limit
        for s in ground[:8]:
            for t in ground[:8]:
                in_block = any(s in blk and t in blk for blk in blocks)
                embeds = False
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
                        if all(
                            size(apply(combined, atom)) <= limit
                            for atom in norm.constraint
                        ):
                            embeds = True
                            break
                    if embeds:
                        break
                assert embeds == in_block, (cls, s, t)
        checked += 1
    assert checked > 20


def test_render_class_is_canonical():
    c1 = make_class([g(Var(3)), h(Var(3))])
    c2 = rename_class_apart(c1, {3})
    assert render_class(c1) == render_class(c2)
    assert render_class(c1) == "{h(x0) ∥ g(x0), h(x0)}"
