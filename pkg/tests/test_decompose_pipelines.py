"""Support shrinking, fixed-set normalization, corner form and headline pipelines."""

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from fiet.certificate import Kind
from fiet.core import Piece, canonicalize, identity, restricted_rotation, rotation, symmetry, transport
from fiet.decompose import (PipelineTrace, commutator_decomposition, corner_support,
                            corner_support_decomposition, fix_increasing_involution, involution_decomposition,
                            normalize_fixed_set, s_n, shrink_support, strongly_reversible_decomposition)
from fiet.decompose.corner import EpsilonOutOfRange, corner_epsilon
from fiet.invariants import certify_order, saf
from fiet.verify import verify

from conftest import B2, Q, rot, sample

seeds = st.integers(min_value=0, max_value=10 ** 9)
R_IRR = rotation(B2.element(["0", "1/2"]))


def q(x):
    return Q.const(mpq(x))


def product(cert):
    out = identity(cert.target.basis)
    for f in cert.factors:
        out = out.compose(f.value)
    return out


# shrink_support -------------------------------------------------------------------

def test_shrink_identity():
    r = shrink_support(identity(B2), 5)
    assert r.p.is_identity() and r.p_prime.is_identity() and r.g.is_identity()


def test_shrink_irrational_rotation():
    r = shrink_support(R_IRR, 4)
    assert r.replay(R_IRR)
    assert r.g.support_measure().compare(mpq(1, 4)) <= 0
    assert r.g.num_breakpoints <= 10
    assert certify_order(r.p, r.order_p) and certify_order(r.p_prime, r.order_p_prime)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([2, 8, 32]))
def test_shrink_random(seed, n):
    f = sample(seed, mmax=6)
    m = len(f)
    r = shrink_support(f, n)
    assert r.replay(f)
    assert r.g.support_measure().compare(mpq(1, n)) <= 0
    assert r.g.num_breakpoints <= 5 * m
    assert certify_order(r.p, r.order_p) and certify_order(r.p_prime, r.order_p_prime)
    if not f.is_rational():
        pf = r.p.compose(f)
        assert pf.num_breakpoints <= 2 * m
        for a in f.lefts():
            assert abs(pf.piece_at(a).offset).compare(mpq(2, r.Q)) <= 0


# normalize_fixed_set -------------------------------------------------------------

def test_normalize_example():
    g = restricted_rotation(mpq(1, 8), (mpq(1, 4), mpq(1, 2)), Q)
    h, g2 = normalize_fixed_set(g)
    assert g2.fixed_set() == [(Q.zero, Q.const(mpq(3, 4)))]
    assert h.compose(g).compose(h.inverse()) == g2
    prefix = restricted_rotation(mpq(1, 8), (mpq(1, 2), 1), Q)
    h, g2 = normalize_fixed_set(prefix)
    assert h.is_identity() and g2 == prefix


@settings(max_examples=60, deadline=None)
@given(seeds, st.booleans())
def test_normalize_random(seed, flips):
    rng = random.Random(seed)
    f = sample(seed, flips=flips)
    # give the map a fixed part by conjugating a compressed copy into a random slot
    g = f.compose(sample(rng.randrange(10 ** 9), flips=flips))
    if rng.random() < 0.7:
        lo = B2.const(mpq(rng.randrange(0, 8), 16))
        g = transport(g, (0, 1), (lo, lo + B2.const(mpq(1, 2))))
    m = len(g)
    h, g2 = normalize_fixed_set(g)
    assert h.is_flip_free()
    assert h.compose(g).compose(h.inverse()) == g2
    fix = g.fixed_measure()
    if fix.is_zero():
        assert g2.fixed_set() == []
    else:
        assert g2.fixed_set() == [(B2.zero, fix)]
    assert g2.num_breakpoints <= 3 * m


# corner form -------------------------------------------------------------------------

def test_s_n_values():
    assert s_n(1) == 1
    assert s_n(2) == 4
    assert [s_n(n) for n in (3, 4, 10)] == [5, 7, 11]
    assert corner_epsilon(2) == mpq(1, 8)


def test_fix_increasing_example():
    i = fix_increasing_involution(rot("1/2"), mpq(1, 10), delta=mpq(1, 4))
    # swaps [0, 1/4) and [1/2, 3/4)
    expected = canonicalize(Q, [Piece(q(0), q("1/4"), 1, q("1/2")), Piece(q("1/4"), q("1/2"), 1, q(0)),
                                Piece(q("1/2"), q("3/4"), 1, q("-1/2")), Piece(q("3/4"), q(1), 1, q(0))])
    assert i == expected
    fixed = i.compose(rot("1/2")).fixed_set()
    assert any(a == 0 and b.compare(mpq(1, 4)) >= 0 for a, b in fixed)
    assert i.compose(rot("1/2")).fixed_measure().compare(mpq(1, 5)) >= 0


def test_fix_increasing_identity_and_range():
    assert fix_increasing_involution(identity(B2), mpq(1, 10)).is_identity()
    with pytest.raises(EpsilonOutOfRange):
        fix_increasing_involution(R_IRR, 0)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_fix_increasing_random(seed):
    f = sample(seed)
    eps = mpq(1, 10)
    i = fix_increasing_involution(f, eps)
    assert i.compose(i).is_identity()
    before = f.fixed_measure()
    need = before + (1 - before) * ((1 - eps) / 5)
    assert i.compose(f).fixed_measure().compare(need) >= 0


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_corner_n2(seed):
    f = sample(seed, mmax=6)
    res = corner_support(f, 2)
    assert len(res.involutions) == 4
    prod = identity(f.basis)
    for i in res.involutions:
        assert i.compose(i).is_identity()
        prod = prod.compose(i)
    assert prod.compose(res.conjugate()) == f
    assert res.g.support_within(B2.const(mpq(1, 2)), B2.one)


def test_corner_n1_and_certificate():
    f = sample(4)
    c = corner_support_decomposition(f, 1)
    assert c.meta["s_n"] == 1 and len(c.factors) == 2
    assert verify(c).ok
    c = corner_support_decomposition(f, 3)
    assert len(c.factors) == s_n(3) + 1 and verify(c).ok


# headline pipelines -----------------------------------------------------------------

def test_pipelines_on_identity():
    for fn in (commutator_decomposition, strongly_reversible_decomposition, involution_decomposition):
        c = fn(identity(B2))
        assert c.factors == [] and verify(c).ok


def test_periodic_is_one_commutator():
    p = sample(17, grid=24, basis=Q)
    c = commutator_decomposition(p)
    assert c.count() == 1 and verify(c).ok


def test_restricted_rotation_is_one_strongly_reversible_factor():
    J = (B2.const(mpq(1, 4)), B2.element(["0", "1/2"]))
    R = restricted_rotation(B2.element(["0", "1/10"]), J)
    c = strongly_reversible_decomposition(R)
    assert c.count() == 1 and verify(c).ok
    w = c.factors[0].witness
    assert w.i1 == symmetry(J)
    assert w.i2 == symmetry(J).compose(R)


def test_involution_is_one_involution_factor():
    I = symmetry((B2.const(mpq(1, 3)), B2.element(["0", "1/2"])))
    c = involution_decomposition(I)
    assert c.count() == 1 and verify(c).ok


@settings(max_examples=15, deadline=None)
@given(seeds, st.booleans(), st.booleans())
def test_pipelines_random(seed, flips, grid):
    F = sample(seed, flips=flips, grid=64 if grid else None, basis=Q if grid else B2)
    trace = PipelineTrace()
    c = commutator_decomposition(F, trace)
    assert product(c) == F
    assert c.count() <= (6 if flips and not F.is_flip_free() else 5)
    assert verify(c).ok
    sr = strongly_reversible_decomposition(F)
    assert sr.count() <= 6 and verify(sr).ok
    inv = involution_decomposition(F)
    assert inv.count() <= 12 and verify(inv).ok
    for f in inv.factors:
        assert f.value.compose(f.value).is_identity()


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_flip_free_commutator_factors_saf(seed):
    F = sample(seed)
    c = commutator_decomposition(F)
    total = saf(identity(B2))
    for f in c.factors:
        if f.value.is_flip_free():
            total = total + saf(f.value)
    if all(f.value.is_flip_free() for f in c.factors):
        assert total == saf(F)
