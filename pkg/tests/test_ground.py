"""Tests for the ground congruence closure baseline and its oracle."""

import random

import pytest

from ccx.constraints import Bound, count_ground_terms, enumerate_ground_terms
from ccx.frontend import build_beta
from ccx.ground import GroundPartition, cc_saturate, eq_closure, ground_equations
from ccx.terms import App, Signature, Symbol, Var

from _gen import rand_instance

f = Symbol("f", 1)
g = Symbol("g", 1)
h = Symbol("h", 1)
a = Symbol("a", 0)
b = Symbol("b", 0)
x = Var(0)
A, B = App(a), App(b)


def test_ground_equations_examples():
    sig = Signature((a, g, h))
    bound = build_beta(sig, 1)
    got = ground_equations([(g(x), h(x))], sig, bound)
    assert got == [(g(A), h(A))]

    got = ground_equations([(A, g(A))], sig, bound)
    assert got == [(A, g(A))]

    big = g(g(g(A)))
    assert ground_equations([(big, x)], sig, bound) == []


def test_cc_saturate_examples():
    sig = Signature((a, f))
    bound = build_beta(sig, 2)
    universe = enumerate_ground_terms(sig, bound)
    part = cc_saturate(universe, [(A, f(A))])
    assert part.blocks_total == 1
    assert part.same(A, f(f(A)))

    part = cc_saturate(universe, [])
    assert part.blocks_total == len(universe)


def test_counterexample_blocks():
    sig = Signature((f, g, h, a, b))
    bound = build_beta(sig, 1)
    eqs = [
        (f(A), h(A)),
        (g(A), h(A)),
        (f(B), h(B)),
        (g(B), h(B)),
        (A, f(A)),
        (B, f(B)),
    ]
    geqs = ground_equations(eqs + [(f(x), g(x))], sig, bound)
    universe = enumerate_ground_terms(sig, bound)
    part = cc_saturate(universe, geqs)
    assert part.blocks_nonsingleton == 2
    assert part.same(A, g(A)) and part.same(B, g(B))
    assert not part.same(A, B)


def test_eq_closure_trivial():
    part = eq_closure([A], [])
    assert part.blocks_total == 1

    part = eq_closure([A, B], [(A, B)])
    assert part.blocks() == [[A, B]]


def test_closure_routes_agree():
    rng = random.Random(20)
    checked = 0
    while checked < 200:
        inst = rand_instance(rng, max_terms=150)
        if inst is None:
            continue
        sig, bound, eqs = inst
        universe = enumerate_ground_terms(sig, bound)
        geqs = ground_equations(eqs, sig, bound)
        assert cc_saturate(universe, geqs).key() == eq_closure(universe, geqs).key()
        checked += 1


def test_congruence_closed():
    rng = random.Random(21)
    checked = 0
    while checked < 60:
        inst = rand_instance(rng, max_terms=80)
        if inst is None:
            continue
        sig, bound, eqs = inst
        universe = enumerate_ground_terms(sig, bound)
        part = cc_saturate(universe, ground_equations(eqs, sig, bound))
        by_sym = {}
        for t in universe:
            if isinstance(t, App) and t.args:
                by_sym.setdefault(t.sym.name, []).append(t)
        for group in by_sym.values():
            for i, s in enumerate(group):
                for t in group[i + 1 :]:
                    if all(part.same(u, v) for u, v in zip(s.args, t.args)):
                        assert part.same(s, t)
        checked += 1


def test_delete_rule_semantics():
    # re-asserting an equation already inside one block changes nothing
    sig = Signature((a, f))
    bound = build_beta(sig, 3)
    universe = enumerate_ground_terms(sig, bound)
    base = cc_saturate(universe, [(A, f(A))])
    again = cc_saturate(universe, [(A, f(A)), (f(A), f(f(A)))])
    assert base.key() == again.key()


def test_equation_outside_universe_rejected():
    with pytest.raises(ValueError):
        cc_saturate([A], [(A, B)])
    with pytest.raises(ValueError):
        eq_closure([A], [(A, B)])


def test_partition_dump():
    part = GroundPartition([A, B, f(A)])
    part.union_terms(A, f(A))
    text = part.dump(time_ms=5)
    lines = text.splitlines()
    assert lines[0] == "blocks_total=2"
    assert lines[1] == "blocks_nonsingleton=1"
    assert lines[2] == "time_ms=5"
    assert "{a, f(a)}" in lines
