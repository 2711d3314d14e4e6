import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from fiet.core import identity, restricted_rotation, rotation, symmetry
from fiet.exactnum import Basis
from fiet.invariants import (FlipPresent, NotPeriodicWithin, Periodic, SafInvariant, certify_order,
                             in_commutator_subgroup, is_periodic, saf)

from conftest import B2, Q, rot, sample

seeds = st.integers(min_value=0, max_value=10 ** 9)
s = sympy.Symbol("s")          # stands for sqrt(2) as a formal basis vector


def tensor_oracle(lams, deltas, dim=2):
    """Expand sum lambda_i (x) delta_i coordinate by coordinate from symbolic data."""
    M = [[sympy.Integer(0)] * dim for _ in range(dim)]
    for lam, delta in zip(lams, deltas):
        pl = sympy.Poly(sympy.expand(lam), s)
        pd = sympy.Poly(sympy.expand(delta), s)
        for j in range(dim):
            for k in range(dim):
                M[j][k] += pl.coeff_monomial(s ** j) * pd.coeff_monomial(s ** k)
    return [[sympy.Rational(x) for x in row] for row in M]


def as_sympy(m: SafInvariant):
    return [[sympy.Rational(int(x.numerator), int(x.denominator)) for x in row] for row in m.matrix]


def test_saf_of_irrational_rotation_matches_tensor_oracle():
    alpha = s / 2
    expected = tensor_oracle([1 - alpha, alpha], [alpha, alpha - 1])
    assert expected == [[0, sympy.Rational(1, 2)], [sympy.Rational(-1, 2), 0]]
    got = saf(rotation(B2.element(["0", "1/2"])))
    assert as_sympy(got) == expected
    assert got.is_antisymmetric()
    assert not in_commutator_subgroup(rotation(B2.element(["0", "1/2"])))


def test_saf_of_rational_rotations_vanishes():
    assert saf(rot("1/2")).is_zero()
    rng = random.Random(7)
    for _ in range(20):
        q = rng.randint(2, 50)
        p = rng.randint(1, q - 1)
        f = rotation(B2.const(mpq(p, q)))
        assert saf(f).is_zero()
        assert in_commutator_subgroup(f)


def test_saf_rejects_flips():
    with pytest.raises(FlipPresent):
        saf(symmetry((0, 1), Q))


@settings(max_examples=60, deadline=None)
@given(seeds, seeds)
def test_saf_vanishes_on_commutators(s1, s2):
    a, b = sample(s1), sample(s2)
    assert saf(a.commutator(b)).is_zero()
    assert in_commutator_subgroup(a.commutator(b).compose(b.commutator(a.inverse())))


@settings(max_examples=60, deadline=None)
@given(seeds, seeds)
def test_saf_additive_and_conjugation_invariant(s1, s2):
    f, g = sample(s1), sample(s2)
    assert saf(f.compose(g)) == saf(f) + saf(g)
    assert saf(g.compose(f).compose(g.inverse())) == saf(f)
    assert saf(f.inverse()) == -saf(f)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_saf_matrix_is_antisymmetric_on_iets(seed):
    assert saf(sample(seed, basis=Basis.sqrt(2, 3))).is_antisymmetric()


def test_saf_random_map_against_oracle():
    f = sample(5)
    lams = [sympy.Rational(int(p.length().c[0].numerator), int(p.length().c[0].denominator))
            + sympy.Rational(int(p.length().c[1].numerator), int(p.length().c[1].denominator)) * s
            for p in f.pieces]
    deltas = [sympy.Rational(int(p.offset.c[0].numerator), int(p.offset.c[0].denominator))
              + sympy.Rational(int(p.offset.c[1].numerator), int(p.offset.c[1].denominator)) * s
              for p in f.pieces]
    assert as_sympy(saf(f)) == tensor_oracle(lams, deltas)


def test_periodicity_examples():
    assert is_periodic(rot("1/3")) == Periodic(3)
    assert is_periodic(symmetry((0, 1), Q)) == Periodic(2)
    assert is_periodic(rotation(B2.element(["0", "1/2"])), 100) == NotPeriodicWithin(100)
    assert is_periodic(identity(Q)) == Periodic(1)


@settings(max_examples=40, deadline=None)
@given(seeds, st.booleans())
def test_periodic_verdicts_replay(seed, flips):
    rng = random.Random(seed)
    f = sample(seed, grid=rng.choice([12, 30, 64]), basis=Q, flips=flips)
    v = is_periodic(f)
    assert isinstance(v, Periodic)
    assert certify_order(f, v.order)
    g = identity(Q)
    for k in range(1, v.order + 1):
        g = g.compose(f)
        assert g.is_identity() == (k == v.order)


def test_periodic_irrational_finite_order():
    J = (B2.const(mpq(1, 5)), B2.element(["0", "1/2"]))
    f = restricted_rotation((J[1] - J[0]) / 3, J)
    assert is_periodic(f, 10) == Periodic(3)
    assert not certify_order(f, 6)
