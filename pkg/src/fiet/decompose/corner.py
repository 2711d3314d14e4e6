"""Involutions that enlarge the fixed set, and the corner-support form.

Each involution swaps disjoint pairs ``I``, ``f(I)`` of short intervals so
that ``i o f`` is the identity on every chosen ``I``.  Iterating gives
``f = i_1 o ... o i_s o (h o g_n o h^-1)`` with ``g_n`` supported in
``[1 - 1/n, 1)``.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import cmp_to_key

from gmpy2 import mpq

from ..certificate import Certificate, ConjugateWitness, Factor, InvolutionWitness, Kind
from ..core import Fiet, Piece, canonicalize, identity
from ..exactnum import ExactReal, floor_ratio
from .normalize import normalize_fixed_set
from .rotations import NotFlipFree

MAX_HALVINGS = 40

_by_left = cmp_to_key(lambda p, q: p.left.compare(q.left))


class EpsilonOutOfRange(ValueError):
    pass


class CornerFailed(RuntimeError):
    pass


def s_n(n: int) -> int:
    """``floor(ln n / ln 1.25) + 1``, computed exactly as ``1 + max{k : 5^k <= n 4^k}``."""
    if n < 1:
        raise ValueError("n must be positive")
    k = 0
    while 5 ** (k + 1) <= n * 4 ** (k + 1):
        k += 1
    return k + 1


def _fixed_in(f: Fiet, J) -> ExactReal:
    c, d = J
    outside = f.basis.one - (d - c)
    return f.fixed_measure() - outside


def _required(fix: ExactReal, size: ExactReal, eps: mpq) -> ExactReal:
    return fix + (size - fix) * ((1 - eps) / 5)


def _swap_involution(basis, chosen: list[tuple[ExactReal, ExactReal, ExactReal]]) -> Fiet:
    """Involution exchanging each ``[x, x + w)`` with ``[x + d, x + d + w)`` by translation."""
    raw = []
    for x, w, d in chosen:
        raw.append(Piece(x, x + w, 1, d))
        raw.append(Piece(x + d, x + d + w, 1, -d))
    raw.sort(key=_by_left)
    out, x = [], basis.zero
    for p in raw:
        if p.left.compare(x) > 0:
            out.append(Piece(x, p.left, 1, basis.zero))
        out.append(p)
        x = p.right
    if x.compare(1) < 0:
        out.append(Piece(x, basis.one, 1, basis.zero))
    return canonicalize(basis, out)


class _Taken:
    """Disjoint half-open intervals of equal length, kept sorted.

    Float keys order them correctly because distinct members are at least
    one interval length apart; every overlap decision is exact.
    """

    def __init__(self):
        self.keys: list[float] = []
        self.items: list[tuple[ExactReal, ExactReal]] = []

    def overlaps(self, lo: ExactReal, hi: ExactReal) -> bool:
        k = bisect_left(self.keys, float(lo))
        for a, b in self.items[max(k - 2, 0):k + 2]:
            if lo.compare(b) < 0 and a.compare(hi) < 0:
                return True
        return False

    def add(self, lo: ExactReal, hi: ExactReal) -> None:
        key = float(lo)
        k = bisect_left(self.keys, key)
        self.keys.insert(k, key)
        self.items.insert(k, (lo, hi))


def _case1(f: Fiet, J, eps: mpq, delta: mpq | None = None) -> Fiet:
    """``f`` has no fixed point in ``J``; greedy disjoint swaps on a ``delta``-grid.

    Pieces are visited by decreasing displacement, so long runs of grid
    intervals are taken first, and the selection stops once the required
    gain is reached.  Pieces moving less than ``delta`` are skipped; the
    exact check halves ``delta`` when the gain falls short.
    """
    basis = f.basis
    c, d = J
    size = d - c
    pieces = [p for p in f.cut([c, d]) if p.left.compare(c) >= 0 and p.right.compare(d) <= 0]
    pieces.sort(key=cmp_to_key(lambda p, q: abs(q.offset).compare(abs(p.offset))))
    m = len(pieces)
    need = _required(basis.zero, size, eps)
    if delta is None:
        delta = mpq(1)
        bound = size * eps / m
        while bound.compare(delta) <= 0:
            delta /= 2
    for _ in range(MAX_HALVINGS):
        step = basis.const(delta)
        taken = _Taken()
        chosen = []
        gained = basis.zero
        for p in pieces:
            if gained.compare(need) >= 0:
                break
            if abs(p.offset).compare(step) < 0:
                continue
            k = floor_ratio(p.length(), step)
            for j in range(k):
                x = p.left + step * j
                y = x + p.offset
                if taken.overlaps(x, x + step) or taken.overlaps(y, y + step):
                    continue
                taken.add(x, x + step)
                taken.add(y, y + step)
                chosen.append((x, step, p.offset))
                gained = gained + step
                if gained.compare(need) >= 0:
                    break
        i = _swap_involution(basis, chosen) if chosen else identity(basis)
        if _fixed_in(i.compose(f), J).compare(need) >= 0:
            return i
        delta /= 2
    raise CornerFailed("no grid size gave the required fixed-set gain")


def fix_increasing_involution(f: Fiet, eps, J=None, delta=None) -> Fiet:
    """Involution ``i`` with ``|Fix(i o f)| >= |Fix f| + (|J| - |Fix f|)(1 - eps)/5``.

    ``delta`` fixes the initial grid step; by default it is the largest
    power of two below ``|J| eps / m``.
    """
    eps = mpq(eps)
    delta = None if delta is None else mpq(delta)
    if not 0 < eps < 1:
        raise EpsilonOutOfRange(f"epsilon {eps} outside (0, 1)")
    if not f.is_flip_free():
        raise NotFlipFree("fix_increasing_involution needs a flip-free map")
    basis = f.basis
    if J is None:
        J = (basis.zero, basis.one)
    c, d = J
    if not f.support_within(c, d):
        raise ValueError("map is not supported in J")
    fix = _fixed_in(f, J)
    if fix.compare(d - c) == 0:
        return identity(basis)
    if fix.is_zero():
        i = _case1(f, J, eps, delta)
    else:
        h, f2 = normalize_fixed_set(f, within=J)
        j = _case1(f2, (c + fix, d), eps, delta)
        i = h.inverse().compose(j).compose(h)
    if _fixed_in(i.compose(f), J).compare(_required(fix, d - c, eps)) < 0:
        raise CornerFailed("fixed-set inequality failed")
    return i


def corner_epsilon(n: int) -> mpq:
    """Largest ``2^-k`` with ``((4 + eps)/5)^s_n <= 1/n``."""
    s = s_n(n)
    eps = mpq(1, 2)
    while ((4 + eps) / 5) ** s > mpq(1, n):
        eps /= 2
    return eps


@dataclass
class CornerResult:
    involutions: list
    h: Fiet
    g: Fiet
    n: int

    def conjugate(self) -> Fiet:
        return self.h.compose(self.g).compose(self.h.inverse())


def corner_support(f: Fiet, n: int, eps=None) -> CornerResult:
    """Involutions ``i_1..i_{s_n}``, ``h`` and ``g_n`` with ``f = i_1 ... i_{s_n} (h g_n h^-1)``."""
    if not f.is_flip_free():
        raise NotFlipFree("corner-support form needs a flip-free map")
    basis = f.basis
    s = s_n(n)
    eps = corner_epsilon(n) if eps is None else mpq(eps)
    cur = f
    invs = []
    for _ in range(s):
        i = fix_increasing_involution(cur, eps)
        invs.append(i)
        cur = i.compose(cur)
    if cur.fixed_measure().compare(basis.one - basis.const(mpq(1, n))) < 0:
        raise CornerFailed("fixed set too small after s_n steps")
    h0, g = normalize_fixed_set(cur)
    return CornerResult(invs, h0.inverse(), g, n)


def corner_support_decomposition(f: Fiet, n: int, eps=None) -> Certificate:
    res = corner_support(f, n, eps)
    factors = [Factor(i, InvolutionWitness()) for i in res.involutions]
    factors.append(Factor(res.conjugate(), ConjugateWitness(res.h, res.g, n)))
    return Certificate(f, Kind.CORNER_SUPPORT, factors, {"n": n, "s_n": s_n(n)})
