"""SAF invariant, commutator-subgroup membership, and periodicity."""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

import numpy as np
from gmpy2 import mpq
from sympy import factorint

from .core import Fiet, FietError
from .exactnum import format_mpq

__all__ = [
    "FlipPresent",
    "NotPeriodic",
    "NotPeriodicWithin",
    "Periodic",
    "SafInvariant",
    "certify_order",
    "in_commutator_subgroup",
    "is_periodic",
    "saf",
]

GRID_LIMIT = 1 << 22


class FlipPresent(FietError):
    pass


class NotPeriodic(FietError):
    pass


@dataclass(frozen=True)
class SafInvariant:
    """Full (p+1) x (p+1) matrix of sum_k lambda_k (x) delta_k in basis coordinates."""

    matrix: tuple

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.matrix for x in row)

    def __add__(self, other: "SafInvariant") -> "SafInvariant":
        return SafInvariant(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.matrix, other.matrix)))

    def __neg__(self) -> "SafInvariant":
        return SafInvariant(tuple(tuple(-a for a in r) for r in self.matrix))

    def __sub__(self, other):
        return self + (-other)

    def is_antisymmetric(self) -> bool:
        n = self.dim
        return all(self.matrix[i][j] == -self.matrix[j][i] for i in range(n) for j in range(n))

    @classmethod
    def zero(cls, dim: int) -> "SafInvariant":
        return cls(tuple(tuple(mpq(0) for _ in range(dim)) for _ in range(dim)))

    def to_json(self) -> list:
        return [[format_mpq(x) for x in row] for row in self.matrix]


def saf(f: Fiet) -> SafInvariant:
    if not f.is_flip_free():
        raise FlipPresent("SAF is defined on flip-free maps")
    d = f.basis.dim
    M = [[mpq(0)] * d for _ in range(d)]
    for p in f.pieces:
        lam = p.length().c
        delta = p.offset.c
        for j, lj in enumerate(lam):
            if not lj:
                continue
            row = M[j]
            for k, dk in enumerate(delta):
                if dk:
                    row[k] += lj * dk
    return SafInvariant(tuple(tuple(r) for r in M))


def in_commutator_subgroup(f: Fiet) -> bool:
    return saf(f).is_zero()


@dataclass(frozen=True)
class Periodic:
    order: int

    def to_json(self) -> dict:
        return {"verdict": "Periodic", "order": self.order}


@dataclass(frozen=True)
class NotPeriodicWithin:
    cap: int

    def to_json(self) -> dict:
        return {"verdict": "NotPeriodicWithin", "cap": self.cap}


def _denominator(f: Fiet) -> int:
    q = 1
    for p in f.pieces:
        q = lcm(q, int(p.left.c[0].denominator), int(p.offset.c[0].denominator))
    return q


def _grid_order(f: Fiet, q: int) -> int:
    """Order of a rational map acting on the cells [k/q, (k+1)/q)."""
    target = np.empty(q, dtype=np.int64)
    flip = np.zeros(q, dtype=np.int64)
    for p in f.pieces:
        lo = int(p.left.c[0] * q)
        hi = int(p.right.c[0] * q)
        cells = np.arange(lo, hi, dtype=np.int64)
        off = int(p.offset.c[0] * q)
        if p.sign == 1:
            target[lo:hi] = cells + off
        else:
            target[lo:hi] = off - cells - 1
            flip[lo:hi] = 1
    # pointer doubling: label = min index on the cycle
    label = np.arange(q, dtype=np.int64)
    jump = target.copy()
    span = 1
    while span < q:
        label = np.minimum(label, label[jump])
        jump = jump[jump]
        span *= 2
    lengths = np.bincount(label, minlength=q)
    parity = np.bincount(label, weights=flip, minlength=q).astype(np.int64) % 2
    reps = np.nonzero(lengths)[0]
    order = 1
    for L, par in set(zip(lengths[reps].tolist(), parity[reps].tolist())):
        order = lcm(order, L * (2 if par else 1))
    return order


def _orbit_order(f: Fiet) -> int | None:
    """Order of a flip-free rational map via the partition cut by breakpoint orbits."""
    points = {}
    frontier = [p.left for p in f.pieces]
    limit = GRID_LIMIT
    for x in frontier:
        points[x.c] = x
    while frontier:
        nxt = []
        for x in frontier:
            y = f(x)
            if y.c not in points:
                points[y.c] = y
                nxt.append(y)
                if len(points) > limit:
                    return None
        frontier = nxt
    cuts = sorted(points.values(), key=lambda v: v.c[0])
    index = {x.c: i for i, x in enumerate(cuts)}
    n = len(cuts)
    succ = [index[f(x).c] for x in cuts]
    seen = bytearray(n)
    order = 1
    for i in range(n):
        if seen[i]:
            continue
        L, j = 0, i
        while not seen[j]:
            seen[j] = 1
            j = succ[j]
            L += 1
        order = lcm(order, L)
    return order


def is_periodic(f: Fiet, cap: int = 1000) -> Periodic | NotPeriodicWithin:
    """Decide whether ``f`` has finite order.

    Rational maps are decided exactly, independent of ``cap``.  Other maps
    are checked by exact powers ``f, f^2, ..., f^cap``.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if f.is_identity():
        return Periodic(1)
    if f.is_rational():
        q = _denominator(f)
        if q <= GRID_LIMIT:
            return Periodic(_grid_order(f, q))
        if f.is_flip_free():
            order = _orbit_order(f)
            if order is not None:
                return Periodic(order)
    g = f
    for k in range(2, cap + 1):
        g = g.compose(f)
        if g.is_identity():
            return Periodic(k)
    return NotPeriodicWithin(cap)


def certify_order(f: Fiet, n: int) -> bool:
    """Exact check that ``f`` has order exactly ``n``."""
    if n < 1:
        return False
    if not (f ** n).is_identity():
        return False
    for prime in factorint(n):
        if (f ** (n // prime)).is_identity():
            return False
    return True
