import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from fiet.exactnum import (Basis, BasisMismatch, ExactReal, InvalidBasis, OracleGenerator, PrecisionExhausted,
                           floor_ratio)

B2 = Basis.sqrt(2)
B23 = Basis.sqrt(2, 3)
SQ = {B2: [sympy.sqrt(2)], B23: [sympy.sqrt(2), sympy.sqrt(3)]}

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=64).map(lambda f: mpq(f.numerator, f.denominator))


def reals(basis):
    return st.lists(rationals, min_size=basis.dim, max_size=basis.dim).map(basis.element)


def sym(x: ExactReal):
    """Independent symbolic value of ``x``."""
    gens = [sympy.Integer(1)] + SQ[x.basis]
    return sum(sympy.Rational(int(c.numerator), int(c.denominator)) * g for c, g in zip(x.c, gens))


def test_cancellation():
    a = B2.element(["1/2", "1/2"])
    b = B2.element(["1/2", "-1/2"])
    assert a + b == B2.one
    assert (a + b).is_rational()


def test_additive_identity():
    x = B2.element(["3/7", "-2/5"])
    assert x + B2.zero == x


def test_exact_zero():
    assert ((B2.one - B2.gen(1)) + (B2.gen(1) - B2.one)).is_zero()


def test_compare_three_halves_sqrt2():
    # (3/2)^2 = 9/4 > 2
    assert mpq(3, 2) ** 2 > 2
    assert B2.const(mpq(3, 2)).compare(B2.gen(1)) == 1


def test_compare_equal():
    x = B2.element(["1/3", "5/8"])
    assert x.compare(x) == 0


def test_compare_sqrt2_minus_one():
    assert 1 < 2 < 4
    assert (B2.gen(1) - 1).compare(0) == 1


def test_floor_ratio_examples():
    assert sympy.floor(1 / (sympy.sqrt(2) - 1)) == 2
    assert floor_ratio(B2.one, B2.gen(1) - 1) == 2
    assert floor_ratio(B2.const(mpq(3, 4)), B2.const(mpq(1, 4))) == 3
    assert floor_ratio(B2.zero, B2.gen(1)) == 0


def test_floor_ratio_exact_multiple_ties_down_to_itself():
    x = B2.gen(1) - 1
    assert floor_ratio(x * 5, x) == 5


@settings(max_examples=200, deadline=None)
@given(reals(B23), reals(B23))
def test_compare_matches_symbolic_oracle(a, b):
    expect = sympy.sign(sym(a) - sym(b))
    assert a.compare(b) == expect
    assert (a.compare(b) == 0) == (a.c == b.c) == (a - b).is_zero()


@settings(max_examples=100, deadline=None)
@given(reals(B23), reals(B23), reals(B23), rationals, rationals)
def test_module_axioms(a, b, c, p, q):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a - a == B23.zero
    assert -(-a) == a
    assert (a + b) * p == a * p + b * p
    assert a * (p + q) == a * p + a * q


@settings(max_examples=150, deadline=None)
@given(reals(B2), reals(B2))
def test_floor_ratio_bounds(n, d):
    if d.sign() <= 0:
        d = -d + mpq(1, 64)
    k = floor_ratio(n, d)
    assert (d * k).compare(n) <= 0
    assert (n - d * k).compare(d) < 0
    assert k == sympy.floor(sym(n) / sym(d))


def test_products_of_irrationals_rejected():
    with pytest.raises(TypeError):
        B2.gen(1) * B2.gen(1)
    assert B2.gen(1) * B2.const(2) == B2.element([0, 2])


def test_basis_rejects_rational_root_and_dependent_roots():
    with pytest.raises(InvalidBasis):
        Basis.sqrt(4)
    with pytest.raises(InvalidBasis):
        Basis.sqrt(2, 8)


def test_mixing_bases_is_an_error():
    with pytest.raises(BasisMismatch):
        B2.gen(1) + B23.gen(1)


def test_text_and_json_round_trip():
    x = B23.element(["1/2", "-3/4", "5"])
    assert B23.parse(str(x)) == x
    assert ExactReal.from_json(B23, x.to_json()) == x
    assert ExactReal.from_json(B23, {"coords": x.to_json()}) == x
    assert Basis.from_json(B23.to_json()) == B23


PI_DIGITS = "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706"


def test_oracle_generator_orders_against_rationals():
    b = Basis((OracleGenerator(["3", "4"], PI_DIGITS, name="pi"),))
    pi = b.gen(1)
    assert pi.compare(b.const(mpq(355, 113))) == -1
    assert pi.compare(b.const(mpq(22, 7))) == -1
    assert pi.compare(b.const(mpq(311, 99))) == 1


def test_oracle_precision_exhausted():
    b = Basis((OracleGenerator(["3", "4"], "3.1415926535", name="pi"),), budget_bits=8)
    pi = b.gen(1)
    close = b.const(mpq(314159265358979, 10 ** 14))
    with pytest.raises(PrecisionExhausted):
        pi.compare(close)


def test_oracle_refinement_is_monotone():
    g = OracleGenerator(["3", "4"], PI_DIGITS, name="pi")
    prev = g.enclosure(4)
    for bits in (8, 16, 64, 128, 256):
        lo, hi = g.enclosure(bits)
        assert prev[0] <= lo <= hi <= prev[1]
        prev = (lo, hi)
    b = Basis((OracleGenerator(["3", "4"], PI_DIGITS, name="pi"),))
    rng = random.Random(5)
    xs = [b.element([mpq(rng.randrange(-400, 400), 100), mpq(rng.randrange(-5, 6), 7)]) for _ in range(30)]
    first = [[x.compare(y) for y in xs] for x in xs]
    again = [[x.compare(y) for y in xs] for x in xs]
    assert first == again
