"""Tests for subsumption by matching and the prefilters."""

import random

import pytest

from ccx.classes import gnd, gnd_subsumes, make_class, rename_class_apart
from ccx.constraints import count_ground_terms
from ccx.frontend import build_beta
from ccx.subsumption import (
    SymbolBitVector,
    find_subsumer,
    prefilter,
    prefilter_bits,
    subsumes_by_matching,
)
from ccx.terms import App, Signature, Symbol, Var

from _gen import rand_class_pair, rand_signature, rand_class

f = Symbol("f", 1)
g = Symbol("g", 1)
h = Symbol("h", 1)
a = Symbol("a", 0)
b = Symbol("b", 0)
x, y, u = Var(0), Var(1), Var(5)
A, B = App(a), App(b)


def test_prefilter_examples():
    general = make_class([g(x), h(x)])
    instance = make_class([f(A)])
    assert not prefilter(general, instance)

    var_general = make_class([x, f(A)])
    assert prefilter(var_general, instance)

    assert prefilter(general, general)


def test_prefilter_bits_agree():
    rng = random.Random(16)
    for _ in range(200):
        sig = rand_signature(rng)
        bit_of = {s.name: i for i, s in enumerate(sig)}
        c1, c2 = rand_class(sig, rng), rand_class(sig, rng)
        want = prefilter(c1, c2)
        got = prefilter_bits(SymbolBitVector.of(c1, bit_of), SymbolBitVector.of(c2, bit_of))
        assert want == got


def test_subsumes_running_example():
    # the merged class {g(h(y)), h(h(y)), f(h(y))} subsumes the second input class
    sig = Signature((f, g, h, a))
    bound = build_beta(sig, 2)
    merged = make_class([g(h(y)), h(h(y)), f(h(y))])
    second = make_class([h(h(u)), f(h(u))])
    assert subsumes_by_matching(merged, second, bound)
    assert not subsumes_by_matching(second, merged, bound)


def test_incompleteness_pair():
    # matching fails in both directions although the ground families coincide
    sig = Signature((f, g, a, b))
    bound = build_beta(sig, 1)
    cls_a = make_class([f(x), g(A), g(B)])
    cls_b = make_class([f(A), f(B), g(u)])
    assert not subsumes_by_matching(cls_b, cls_a, bound)
    assert not subsumes_by_matching(cls_a, cls_b, bound)
    assert gnd(cls_a, sig, bound) == gnd(cls_b, sig, bound)
    assert gnd_subsumes(cls_b, cls_a, sig, bound)
    assert gnd_subsumes(cls_a, cls_b, sig, bound)


def test_reflexivity():
    rng = random.Random(17)
    for _ in range(150):
        sig = rand_signature(rng)
        bound = build_beta(sig, 2)
        cls = rand_class(sig, rng)
        copy = rename_class_apart(cls, cls.all_vars)
        assert subsumes_by_matching(copy, cls, bound)


def test_requires_disjoint_variables():
    bound = build_beta(Signature((f, a)), 2)
    cls = make_class([f(x)])
    with pytest.raises(ValueError):
        subsumes_by_matching(cls, cls, bound)


def test_soundness_against_gnd():
    rng = random.Random(18)
    positives = 0
    for _ in range(250):
        pair = rand_class_pair(rng)
        if pair is None:
            continue
        sig, bound, general, instance = pair
        if subsumes_by_matching(general, instance, bound):
            positives += 1
            assert gnd_subsumes(general, instance, sig, bound)
    assert positives > 60


def test_prefilter_never_blocks_subsumption():
    rng = random.Random(19)
    for _ in range(250):
        pair = rand_class_pair(rng)
        if pair is None:
            continue
        _, bound, general, instance = pair
        if subsumes_by_matching(general, instance, bound):
            assert prefilter(general, instance)


def test_find_subsumer():
    sig = Signature((f, g, h, a))
    bound = build_beta(sig, 2)
    single = make_class([f(Var(20))])
    gh = make_class([g(Var(21)), h(Var(21))])
    candidates = [(0, single), (1, gh)]

    probe = make_class([f(A)])
    assert find_subsumer(probe, candidates, bound) == 0

    probe = make_class([g(h(y)), h(h(y))])
    assert find_subsumer(probe, candidates, bound) is None

    probe = make_class([g(x), h(x)])
    probe = rename_class_apart(probe, gh.all_vars)
    assert find_subsumer(probe, candidates, bound) == 1
