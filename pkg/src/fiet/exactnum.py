"""Exact arithmetic in the rational span of ``1, alpha_1, ..., alpha_p``.

Values are stored as coordinate vectors over a declared basis whose
generators are assumed linearly independent over Q together with 1.  Under
that declaration the zero test is syntactic, and ordering is decided by
rational interval enclosures of the generators.

Generators come in two flavours:

* square roots of positive rationals, for which comparisons always
  terminate (the value being compared is known to be nonzero), and
* opaque computable reals described by a nested rational interval oracle,
  refined up to a precision budget before giving up with
  :class:`PrecisionExhausted`.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from gmpy2 import isqrt, is_square, mpq, mpz

__all__ = [
    "Basis",
    "BasisMismatch",
    "ExactNumError",
    "ExactReal",
    "InvalidBasis",
    "OracleGenerator",
    "PrecisionExhausted",
    "SqrtGenerator",
    "floor_ratio",
    "to_mpq",
]

DEFAULT_BUDGET_BITS = 256
MAX_BUDGET_BITS = 4096


class ExactNumError(Exception):
    pass


class BasisMismatch(ExactNumError):
    pass


class InvalidBasis(ExactNumError):
    pass


class PrecisionExhausted(ExactNumError):
    """Interval refinement of an opaque generator could not separate a value from 0."""


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_DECIMAL_RE = re.compile(r"^\s*[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\s*$")


def to_mpq(x) -> mpq:
    """Coerce ints, Fractions, mpq and ``"p/q"`` / decimal strings to ``mpq``."""
    if isinstance(x, str):
        m = _RATIONAL_RE.match(x)
        if m:
            return mpq(int(m.group(1)), int(m.group(2) or 1))
        if _DECIMAL_RE.match(x):
            f = Fraction(x.strip())
            return mpq(f.numerator, f.denominator)
        raise ValueError(f"not a rational literal: {x!r}")
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals")
    return mpq(x)


def format_mpq(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class SqrtGenerator:
    """The positive square root of a positive non-square rational."""

    def __init__(self, radicand):
        r = to_mpq(radicand)
        if r <= 0:
            raise InvalidBasis(f"sqrt generator needs a positive radicand, got {r}")
        if is_square(r.numerator * r.denominator):
            raise InvalidBasis(f"sqrt({format_mpq(r)}) is rational")
        self.radicand = r
        # sqrt(n/d) = sqrt(n*d)/d
        self._nd = mpz(r.numerator * r.denominator)
        self._d = mpz(r.denominator)

    @property
    def name(self) -> str:
        return f"sqrt({format_mpq(self.radicand)})"

    def enclosure(self, bits: int) -> tuple[mpq, mpq]:
        s = isqrt(self._nd << (2 * bits))
        lo = mpq(s, self._d << bits)
        hi = mpq(s + 1, self._d << bits)
        return lo, hi

    def to_json(self) -> dict:
        return {"sqrt": format_mpq(self.radicand)}

    def __eq__(self, other):
        return isinstance(other, SqrtGenerator) and other.radicand == self.radicand

    def __hash__(self):
        return hash(("sqrt", self.radicand))


class OracleGenerator:
    """An opaque real given by an initial interval and a refinement oracle.

    ``oracle(bits)`` must return rational ``(lo, hi)`` containing the value,
    nested in every previously returned interval.  A decimal digit string can
    be used instead of a callable; its precision is then finite and refinement
    past the last digit raises :class:`PrecisionExhausted`.
    """

    def __init__(self, interval: Sequence, oracle: Callable[[int], tuple] | str, name: str = "g"):
        lo, hi = (to_mpq(v) for v in interval)
        if not lo < hi:
            raise InvalidBasis("oracle interval must satisfy lo < hi")
        self.interval = (lo, hi)
        self.name = name
        self._digits = None
        if isinstance(oracle, str):
            self._digits = oracle.strip()
            self._oracle = self._digit_oracle
        else:
            self._oracle = oracle

    def _digit_oracle(self, bits: int) -> tuple[mpq, mpq]:
        text = self._digits
        neg = text.startswith("-")
        body = text.lstrip("+-")
        whole, _, frac = body.partition(".")
        want = int(bits * math.log10(2)) + 2
        if want > len(frac):
            raise PrecisionExhausted(f"digit oracle {self.name} has only {len(frac)} decimals")
        frac = frac[:want]
        scale = mpz(10) ** len(frac)
        trunc = mpq(int(whole or "0") * scale + int(frac or "0"), scale)
        ulp = mpq(1, scale)
        return (-trunc - ulp, -trunc) if neg else (trunc, trunc + ulp)

    def enclosure(self, bits: int) -> tuple[mpq, mpq]:
        lo, hi = self._oracle(bits)
        lo, hi = to_mpq(lo), to_mpq(hi)
        if not (self.interval[0] <= lo <= hi <= self.interval[1]):
            raise InvalidBasis(f"oracle for {self.name} left its declared interval")
        return lo, hi

    def to_json(self) -> dict:
        out = {"interval": [format_mpq(v) for v in self.interval]}
        if self._digits is not None:
            out["oracle"] = self._digits
        return out

    def __eq__(self, other):
        if other is self:
            return True
        return (isinstance(other, OracleGenerator) and self._digits is not None
                and other._digits == self._digits and other.interval == self.interval)

    def __hash__(self):
        return hash(self._digits) if self._digits is not None else id(self)


@dataclass(eq=False)
class Basis:
    """Declared generators; the constant 1 is implicit at coordinate 0."""

    generators: tuple = ()
    budget_bits: int = DEFAULT_BUDGET_BITS
    max_budget_bits: int = MAX_BUDGET_BITS
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        sq = [g for g in self.generators if isinstance(g, SqrtGenerator)]
        # sqrt(r1), sqrt(r2) are dependent iff r1*r2 is a rational square
        for i, a in enumerate(sq):
            for b in sq[i + 1:]:
                prod = a.radicand * b.radicand
                if is_square(prod.numerator * prod.denominator):
                    raise InvalidBasis(f"{a.name} and {b.name} are Q-dependent")
        self.dim = len(self.generators) + 1
        self.all_sqrt = len(sq) == len(self.generators)
        self._zero = ExactReal(self, (mpq(0),) * self.dim)
        self._one = self.const(1)

    # construction -----------------------------------------------------
    @classmethod
    def sqrt(cls, *radicands) -> "Basis":
        return cls(tuple(SqrtGenerator(r) for r in radicands))

    @classmethod
    def from_json(cls, data: dict) -> "Basis":
        gens = []
        for i, g in enumerate(data.get("generators", [])):
            if "sqrt" in g:
                gens.append(SqrtGenerator(g["sqrt"]))
            elif "interval" in g:
                if "oracle" not in g:
                    raise InvalidBasis("opaque generator needs an 'oracle' digit string")
                gens.append(OracleGenerator(g["interval"], g["oracle"], name=f"g{i + 1}"))
            else:
                raise InvalidBasis(f"unknown generator declaration {g!r}")
        return cls(tuple(gens), budget_bits=int(data.get("budget_bits", DEFAULT_BUDGET_BITS)))

    def to_json(self) -> dict:
        return {"generators": [g.to_json() for g in self.generators]}

    def __eq__(self, other):
        if other is self:
            return True
        return isinstance(other, Basis) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    # elements -----------------------------------------------------------
    @property
    def zero(self) -> "ExactReal":
        return self._zero

    @property
    def one(self) -> "ExactReal":
        return self._one

    def const(self, q) -> "ExactReal":
        return ExactReal(self, (to_mpq(q),) + (mpq(0),) * (self.dim - 1))

    def gen(self, i: int) -> "ExactReal":
        """The i-th generator, 1-based (index 0 is the constant 1)."""
        c = [mpq(0)] * self.dim
        c[i] = mpq(1)
        return ExactReal(self, tuple(c))

    def element(self, coords: Iterable) -> "ExactReal":
        c = tuple(to_mpq(v) for v in coords)
        if len(c) != self.dim:
            raise BasisMismatch(f"expected {self.dim} coordinates, got {len(c)}")
        return ExactReal(self, c)

    def names(self) -> list[str]:
        return ["1"] + [g.name for g in self.generators]

    # enclosures ---------------------------------------------------------
    def enclosure(self, i: int, bits: int) -> tuple[mpq, mpq]:
        key = (i, bits)
        got = self._cache.get(key)
        if got is not None:
            return got
        with self._lock:
            got = self._cache.get(key)
            if got is None:
                got = self.generators[i - 1].enclosure(bits)
                self._cache[key] = got
        return got

    def parse(self, text: str) -> "ExactReal":
        return ExactReal.parse(self, text)


def _sign_mpq(q: mpq) -> int:
    return (q > 0) - (q < 0)


class ExactReal:
    """An element ``sum(coords[i] * basis[i])`` of the rational span."""

    __slots__ = ("basis", "c")

    def __init__(self, basis: Basis, coords: tuple):
        self.basis = basis
        self.c = coords

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "ExactReal") -> None:
        if other.basis is not self.basis and other.basis != self.basis:
            raise BasisMismatch("operands live on different bases")

    def __add__(self, other):
        if not isinstance(other, ExactReal):
            return self + self.basis.const(other)
        self._check(other)
        return ExactReal(self.basis, tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ExactReal):
            return self - self.basis.const(other)
        self._check(other)
        return ExactReal(self.basis, tuple(a - b for a, b in zip(self.c, other.c)))

    def __rsub__(self, other):
        return self.basis.const(other) - self

    def __neg__(self):
        return ExactReal(self.basis, tuple(-a for a in self.c))

    def __mul__(self, q):
        if isinstance(q, ExactReal):
            if q.is_rational():
                q = q.c[0]
            elif self.is_rational():
                return q * self.c[0]
            else:
                raise TypeError("the span is a Q-module: cannot multiply two irrational values")
        q = to_mpq(q)
        return ExactReal(self.basis, tuple(a * q for a in self.c))

    __rmul__ = __mul__

    def __truediv__(self, q):
        if isinstance(q, ExactReal):
            if not q.is_rational():
                raise TypeError("division by an irrational value leaves the span")
            q = q.c[0]
        q = to_mpq(q)
        return ExactReal(self.basis, tuple(a / q for a in self.c))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational(self) -> mpq:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.c[0]

    def sign(self) -> int:
        c = self.c
        nz = [i for i in range(1, len(c)) if c[i]]
        if not nz:
            return _sign_mpq(c[0])
        basis = self.basis
        if len(nz) == 1 and basis.all_sqrt:
            i = nz[0]
            a, b = c[0], c[i]
            r = basis.generators[i - 1].radicand
            sa, sb = _sign_mpq(a), _sign_mpq(b)
            if sa >= 0 and sb > 0:
                return 1
            if sa <= 0 and sb < 0:
                return -1
            # a and b*sqrt(r) have opposite signs: compare squares
            d = a * a - b * b * r
            return sa if d > 0 else sb
        return self._refine_sign(nz)

    def _refine_sign(self, nz: list[int]) -> int:
        basis = self.basis
        bits = 64
        while True:
            if not basis.all_sqrt and bits > basis.budget_bits:
                if basis.budget_bits >= basis.max_budget_bits:
                    raise PrecisionExhausted(
                        f"could not separate {self} from 0 at {basis.budget_bits} bits "
                        "(is the basis really independent?)"
                    )
                basis.budget_bits = min(2 * basis.budget_bits, basis.max_budget_bits)
            lo = hi = self.c[0]
            for i in nz:
                glo, ghi = basis.enclosure(i, bits)
                ci = self.c[i]
                if ci > 0:
                    lo += ci * glo
                    hi += ci * ghi
                else:
                    lo += ci * ghi
                    hi += ci * glo
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def enclosure(self, bits: int = 64) -> tuple[mpq, mpq]:
        lo = hi = self.c[0]
        for i in range(1, len(self.c)):
            ci = self.c[i]
            if not ci:
                continue
            glo, ghi = self.basis.enclosure(i, bits)
            if ci > 0:
                lo, hi = lo + ci * glo, hi + ci * ghi
            else:
                lo, hi = lo + ci * ghi, hi + ci * glo
        return lo, hi

    def __float__(self):
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    # ordering -----------------------------------------------------------
    def compare(self, other) -> int:
        """-1, 0 or 1 as ``self`` is less than, equal to or greater than ``other``."""
        if not isinstance(other, ExactReal):
            other = self.basis.const(other)
        self._check(other)
        if self.c == other.c:
            return 0
        return (self - other).sign()

    def __eq__(self, other):
        if isinstance(other, ExactReal):
            return self.c == other.c and (other.basis is self.basis or other.basis == self.basis)
        try:
            q = to_mpq(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.is_rational() and self.c[0] == q

    def __hash__(self):
        return hash(self.c)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    # text / json ----------------------------------------------------------
    def __str__(self):
        names = self.basis.names()
        terms = []
        for i, ci in enumerate(self.c):
            if not ci:
                continue
            terms.append(format_mpq(ci) if i == 0 else f"{format_mpq(ci)}*{names[i]}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")

    def __repr__(self):
        return f"ExactReal({self})"

    def to_json(self) -> list[str]:
        return [format_mpq(ci) for ci in self.c]

    @staticmethod
    def from_json(basis: Basis, data) -> "ExactReal":
        if isinstance(data, dict):
            data = data["coords"]
        if isinstance(data, (str, int)):
            return basis.const(data) if not isinstance(data, str) or "*" not in data else basis.parse(data)
        return basis.element(data)

    @staticmethod
    def parse(basis: Basis, text: str) -> "ExactReal":
        """Parse ``"c0 + c1*g1 + ..."``; generators by name or as ``g<i>``."""
        names = {name: i for i, name in enumerate(basis.names())}
        for i in range(1, basis.dim):
            names[f"g{i}"] = i
        coords = [mpq(0)] * basis.dim
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty expression")
        for sign, term in re.findall(r"([+-]?)([^+-]+)", s):
            k = -1 if sign == "-" else 1
            if "*" in term:
                coef, _, name = term.partition("*")
                q = to_mpq(coef)
            elif term in names:
                q, name = mpq(1), term
            else:
                q, name = to_mpq(term), "1"
            if name not in names:
                raise ValueError(f"unknown generator {name!r} in {text!r}")
            coords[names[name]] += k * q
        return ExactReal(basis, tuple(coords))


def floor_ratio(num: ExactReal, den: ExactReal) -> int:
    """Greatest integer ``k`` with ``k * den <= num``; requires ``den > 0``."""
    if not isinstance(den, ExactReal):
        den = num.basis.const(den)
    if not isinstance(num, ExactReal):
        num = den.basis.const(num)
    if den.sign() <= 0:
        raise ValueError("floor_ratio needs a positive denominator")
    if num.is_rational() and den.is_rational():
        return int(num.c[0] // den.c[0])
    nlo, nhi = num.enclosure(64)
    dlo, dhi = den.enclosure(64)
    if dlo > 0:
        k = int(math.floor((nlo + nhi) / (dlo + dhi)))
    else:
        k = 0
    while (den * k).compare(num) > 0:
        k -= 1
    while (den * (k + 1)).compare(num) <= 0:
        k += 1
    return k
