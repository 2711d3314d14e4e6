"""Support shrinking: ``g = p o f o p'`` with small support and few breakpoints."""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from gmpy2 import mpq

from ..certificate import RestrictedRotationWitness
from ..core import Fiet, from_combinatorics, identity, rational_ratio
from ..exactnum import ExactReal, floor_ratio
from ..invariants import Periodic, certify_order, is_periodic
from .flips import disjoint_product
from .rotations import NotFlipFree, rotation_value

MIN_LOG_Q = 3


class ShrinkFailed(RuntimeError):
    pass


@dataclass
class ShrinkResult:
    p: Fiet
    p_prime: Fiet
    g: Fiet
    rotations: list           # the R_i, with p' = (prod R_i)^-1
    order_p: int
    order_p_prime: int
    Q: int
    epsilon: mpq

    def replay(self, f: Fiet) -> bool:
        return self.p.compose(f).compose(self.p_prime) == self.g


def _epsilon(f: Fiet, n: int) -> mpq:
    """Largest power of two with eps < 1/(2n) and eps <= min |I_i| / 4."""
    eps = mpq(1, 4 * n)
    while any(p.length().compare(eps * 4) < 0 for p in f.pieces):
        eps /= 2
    return eps


def _spec_Q(m: int, eps: mpq) -> int:
    """Smallest power of two with 1/Q < eps / (4 m^2)."""
    Q = 1
    while mpq(1, Q) >= eps / (4 * m * m):
        Q *= 2
    return Q


def _floor_to_grid(x: ExactReal, Q: int) -> mpq:
    return mpq(floor_ratio(x * Q, x.basis.one), Q)


def _attempt(f: Fiet, n: int, Q: int) -> ShrinkResult | None:
    basis = f.basis
    m = len(f)
    comb = f.combinatorics()
    b = f.image_breakpoints()
    bq = [_floor_to_grid(x, Q) for x in b] + [mpq(1)]
    if any(bq[j + 1] <= bq[j] for j in range(m)):
        return None
    lam = [basis.const(bq[j + 1] - bq[j]) for j in range(m)]
    inv = [0] * m
    for i, j in enumerate(comb.perm):
        inv[j] = i
    p = from_combinatorics(lam, inv, basis=basis)
    fe = p.compose(f)
    a = f.lefts() + [basis.one]
    rots = []
    for i in range(m):
        ai, an = a[i], a[i + 1]
        piece = fe.piece_at(ai)
        d = piece.offset
        s = d.sign()
        if s == 0:
            continue
        e = piece.right if piece.right.compare(an) < 0 else an
        if s > 0:
            r = min(floor_ratio(an - ai, d), floor_ratio(e - ai, d) + 1)
            if r < 2:
                continue
            rots.append(RestrictedRotationWitness(d, ai, ai + d * r))
        else:
            step = -d
            r = floor_ratio(e - ai, step)
            if r < 2:
                continue
            rots.append(RestrictedRotationWitness(step * (r - 1), ai, ai + step * r))
    prod = disjoint_product(basis, [rotation_value(w) for w in rots])
    p_prime = prod.inverse()
    g = fe.compose(p_prime)
    if g.support_measure().compare(mpq(1, n)) > 0 or len(g) > 5 * m:
        return None
    verdict = is_periodic(p)
    if not isinstance(verdict, Periodic):
        raise ShrinkFailed("rational approximant is not periodic")
    orders = [_rotation_order(w) for w in rots]
    order_pp = lcm(1, *orders)
    if not certify_order(p_prime, order_pp):
        raise ShrinkFailed("p' order certificate failed")
    eps = _epsilon(f, n)
    return ShrinkResult(p, p_prime, g, rots, verdict.order, order_pp, Q, eps)


def _rotation_order(w: RestrictedRotationWitness) -> int:
    return int(rational_ratio(w.alpha, w.right - w.left).denominator)


def shrink_support(f: Fiet, n: int) -> ShrinkResult:
    """Periodic ``p``, ``p'`` with ``|supp(p o f o p')| <= 1/n`` and ``#BP <= 5m``.

    The grid size ``Q`` of the rational approximant starts small and doubles
    until the support and breakpoint bounds hold, up to the size forced by
    ``1/Q < eps / (4 m^2)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not f.is_flip_free():
        raise NotFlipFree("shrink_support needs a flip-free map")
    basis = f.basis
    if f.is_identity():
        one = identity(basis)
        return ShrinkResult(one, one, one, [], 1, 1, 1, mpq(1, 4 * n))
    if f.is_rational():
        p = f.inverse()
        verdict = is_periodic(p)
        one = identity(basis)
        return ShrinkResult(p, one, one, [], verdict.order, 1, 1, _epsilon(f, n))
    m = len(f)
    eps = _epsilon(f, n)
    for _ in range(8):
        cap = _spec_Q(m, eps)
        Q = 1 << MIN_LOG_Q
        while Q <= cap:
            res = _attempt(f, n, Q)
            if res is not None:
                return res
            Q *= 2
        eps /= 2
    raise ShrinkFailed("no grid size met the support and breakpoint bounds")
