"""Interval exchanges with flips, modulo maps that differ on finite sets.

A :class:`Fiet` is stored canonically as the sorted list of its maximal
continuity pieces.  Each :class:`Piece` describes the map on an *open*
interval ``(left, right)``:

* ``sign == +1``: ``x -> x + offset``
* ``sign == -1``: ``x -> offset - x``

Point values at breakpoints are never stored, so two maps that agree off a
finite set have identical canonical forms and compare equal.  Flip-free
canonical forms are the ordinary interval exchanges.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Iterable, Sequence

from gmpy2 import mpq

from .exactnum import Basis, BasisMismatch, ExactReal, to_mpq

__all__ = [
    "CombinatorialDescription",
    "CoverageGap",
    "DomainMismatch",
    "Fiet",
    "FietError",
    "ImagesNotTiling",
    "IrrationalScale",
    "OverlappingPieces",
    "ParameterOutOfRange",
    "Piece",
    "PieceCapExceeded",
    "canonicalize",
    "from_combinatorics",
    "identity",
    "metric_d",
    "restricted_rotation",
    "rotation",
    "set_piece_cap",
    "swap_halves",
    "symmetry",
    "symmetry_S",
    "transport",
]

PIECE_CAP = 1 << 16


def set_piece_cap(cap: int) -> int:
    """Change the global piece-count cap; returns the previous value."""
    global PIECE_CAP
    old, PIECE_CAP = PIECE_CAP, int(cap)
    return old


class FietError(Exception):
    pass


class OverlappingPieces(FietError):
    pass


class CoverageGap(FietError):
    pass


class ImagesNotTiling(FietError):
    pass


class PieceCapExceeded(FietError):
    pass


class DomainMismatch(FietError):
    pass


class IrrationalScale(FietError):
    pass


class ParameterOutOfRange(FietError):
    pass


@dataclass(frozen=True, slots=True)
class Piece:
    left: ExactReal
    right: ExactReal
    sign: int
    offset: ExactReal

    def image(self) -> tuple[ExactReal, ExactReal]:
        if self.sign == 1:
            return self.left + self.offset, self.right + self.offset
        return self.offset - self.right, self.offset - self.left

    def length(self) -> ExactReal:
        return self.right - self.left

    def is_identity(self) -> bool:
        return self.sign == 1 and self.offset.is_zero()

    def same_map(self, other: "Piece") -> bool:
        return self.sign == other.sign and self.offset.c == other.offset.c

    def __eq__(self, other):
        if not isinstance(other, Piece):
            return NotImplemented
        return (self.sign == other.sign and self.left.c == other.left.c
                and self.right.c == other.right.c and self.offset.c == other.offset.c)

    def __hash__(self):
        return hash((self.left.c, self.right.c, self.sign, self.offset.c))


def _cmp(a: ExactReal, b: ExactReal) -> int:
    return a.compare(b)


_key = cmp_to_key(_cmp)


def _merge(pieces: list[Piece]) -> list[Piece]:
    out: list[Piece] = []
    for p in pieces:
        if out and out[-1].same_map(p):
            q = out[-1]
            out[-1] = Piece(q.left, p.right, q.sign, q.offset)
        else:
            out.append(p)
    return out


class Fiet:
    """An element of the group of interval exchanges with flips of [0, 1)."""

    __slots__ = ("basis", "pieces", "_lefts", "_hash")

    def __init__(self, basis: Basis, pieces: Sequence[Piece], *, _trusted: bool = False):
        if not _trusted:
            pieces = canonicalize(basis, pieces).pieces
        if len(pieces) > PIECE_CAP:
            raise PieceCapExceeded(f"{len(pieces)} pieces exceeds the cap {PIECE_CAP}")
        self.basis = basis
        self.pieces = tuple(pieces)
        self._lefts = None
        self._hash = None

    @classmethod
    def _build(cls, basis: Basis, raw: list[Piece]) -> "Fiet":
        return cls(basis, _merge(raw), _trusted=True)

    # basic queries ------------------------------------------------------
    def __len__(self):
        return len(self.pieces)

    @property
    def num_breakpoints(self) -> int:
        """``#BP`` counting the left endpoint of [0, 1), i.e. the number of pieces."""
        return len(self.pieces)

    def breakpoints(self) -> list[ExactReal]:
        """Interior discontinuity points."""
        return [p.left for p in self.pieces[1:]]

    def is_identity(self) -> bool:
        return len(self.pieces) == 1 and self.pieces[0].is_identity()

    def is_flip_free(self) -> bool:
        return all(p.sign == 1 for p in self.pieces)

    def is_rational(self) -> bool:
        return all(p.left.is_rational() and p.offset.is_rational() for p in self.pieces)

    def lefts(self) -> list[ExactReal]:
        if self._lefts is None:
            self._lefts = [p.left for p in self.pieces]
        return self._lefts

    def piece_at(self, x: ExactReal) -> Piece:
        """The piece whose half-open interval ``[left, right)`` contains ``x``."""
        k = bisect_right(self.lefts(), x) - 1
        return self.pieces[max(k, 0)]

    def __call__(self, x) -> ExactReal:
        """Value at ``x`` using the right limit (right-continuous on [left, right))."""
        if not isinstance(x, ExactReal):
            x = self.basis.const(x)
        p = self.piece_at(x)
        if p.sign == 1:
            return x + p.offset
        return p.offset - x

    # group law ------------------------------------------------------------
    def _check(self, other: "Fiet") -> None:
        if other.basis is not self.basis and other.basis != self.basis:
            raise BasisMismatch("maps live on different bases")

    def __matmul__(self, g: "Fiet") -> "Fiet":
        return self.compose(g)

    def __mul__(self, g: "Fiet") -> "Fiet":
        return self.compose(g)

    def compose(self, g: "Fiet") -> "Fiet":
        """``self o g``: first ``g``, then ``self``."""
        self._check(g)
        if g.is_identity():
            return self
        if self.is_identity():
            return g
        fp = self.pieces
        fl = self.lefts()
        nf = len(fp)
        out: list[Piece] = []
        for gp in g.pieces:
            l, r, s, c = gp.left, gp.right, gp.sign, gp.offset
            if s == 1:
                u, v = l + c, r + c
            else:
                u, v = c - r, c - l
            k = bisect_right(fl, u) - 1
            chunk: list[Piece] = []
            while True:
                F = fp[k]
                x0 = u if k == 0 or F.left.compare(u) <= 0 else F.left
                last = k == nf - 1 or F.right.compare(v) >= 0
                x1 = v if last else F.right
                if s == 1:
                    p0, p1 = x0 - c, x1 - c
                    off = c + F.offset if F.sign == 1 else F.offset - c
                else:
                    p0, p1 = c - x1, c - x0
                    off = F.offset + c if F.sign == 1 else F.offset - c
                chunk.append(Piece(p0, p1, F.sign * s, off))
                if last:
                    break
                k += 1
            if s == -1:
                chunk.reverse()
            out.extend(chunk)
        return Fiet._build(self.basis, out)

    def inverse(self) -> "Fiet":
        out = []
        for p in self.pieces:
            u, v = p.image()
            out.append(Piece(u, v, p.sign, -p.offset if p.sign == 1 else p.offset))
        out.sort(key=lambda q: _key(q.left))
        return Fiet._build(self.basis, out)

    def __invert__(self) -> "Fiet":
        return self.inverse()

    def __pow__(self, n: int) -> "Fiet":
        if n < 0:
            return self.inverse() ** (-n)
        result = identity(self.basis)
        base = self
        while n:
            if n & 1:
                result = result.compose(base)
            n >>= 1
            if n:
                base = base.compose(base)
        return result

    def conjugate(self, h: "Fiet") -> "Fiet":
        """``h o self o h^-1``."""
        return h.compose(self).compose(h.inverse())

    def commutator(self, b: "Fiet") -> "Fiet":
        """``[self, b] = self b self^-1 b^-1``."""
        return self.compose(b).compose(self.inverse()).compose(b.inverse())

    def __eq__(self, other):
        if not isinstance(other, Fiet):
            return NotImplemented
        return (self.basis is other.basis or self.basis == other.basis) and self.pieces == other.pieces

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.pieces)
        return self._hash

    def __repr__(self):
        body = ", ".join(
            f"({p.left}, {p.right}): {'x + ' if p.sign == 1 else '-x + '}{p.offset}" for p in self.pieces
        )
        return f"Fiet[{body}]"

    # fixed set / support ----------------------------------------------------
    def fixed_set(self) -> list[tuple[ExactReal, ExactReal]]:
        """Maximal intervals on which the map is the identity (finite sets ignored)."""
        return [(p.left, p.right) for p in self.pieces if p.is_identity()]

    def fixed_measure(self) -> ExactReal:
        total = self.basis.zero
        for p in self.pieces:
            if p.is_identity():
                total = total + (p.right - p.left)
        return total

    def support_measure(self) -> ExactReal:
        return self.basis.one - self.fixed_measure()

    def support_within(self, a, b) -> bool:
        """True when the map is the identity outside ``[a, b)``."""
        a = a if isinstance(a, ExactReal) else self.basis.const(a)
        b = b if isinstance(b, ExactReal) else self.basis.const(b)
        for p in self.pieces:
            if p.is_identity():
                continue
            if p.left.compare(a) < 0 or p.right.compare(b) > 0:
                return False
        return True

    def support_hull(self) -> tuple[ExactReal, ExactReal] | None:
        moving = [p for p in self.pieces if not p.is_identity()]
        if not moving:
            return None
        return moving[0].left, moving[-1].right

    # combinatorics ------------------------------------------------------------
    def combinatorics(self) -> "CombinatorialDescription":
        lengths = [p.length() for p in self.pieces]
        order = sorted(range(len(self.pieces)), key=lambda i: _key(self.pieces[i].image()[0]))
        perm = [0] * len(order)
        for rank, i in enumerate(order):
            perm[i] = rank
        return CombinatorialDescription(tuple(lengths), tuple(perm), tuple(p.sign for p in self.pieces))

    def translations(self) -> list[ExactReal]:
        if not self.is_flip_free():
            raise DomainMismatch("translations are defined for flip-free maps only")
        return [p.offset for p in self.pieces]

    def discontinuities(self) -> list[ExactReal]:
        """``a_i``: left endpoints of the continuity intervals, starting with 0."""
        return list(self.lefts())

    def image_breakpoints(self) -> list[ExactReal]:
        """``b_j``: left endpoints of the ordered image intervals."""
        return sorted((p.image()[0] for p in self.pieces), key=_key)

    # restriction ----------------------------------------------------------------
    def cut(self, points: Iterable[ExactReal]) -> list[Piece]:
        """Pieces refined at the given points (not canonical)."""
        pts = sorted(set(points), key=_key)
        out = []
        j = 0
        for p in self.pieces:
            l = p.left
            while j < len(pts) and pts[j].compare(l) <= 0:
                j += 1
            while j < len(pts) and pts[j].compare(p.right) < 0:
                out.append(Piece(l, pts[j], p.sign, p.offset))
                l = pts[j]
                j += 1
            out.append(Piece(l, p.right, p.sign, p.offset))
        return out

    def to_json(self, with_basis: bool = True) -> dict:
        d = {"pieces": [
            {"left": p.left.to_json(), "right": p.right.to_json(), "sign": p.sign, "offset": p.offset.to_json()}
            for p in self.pieces
        ]}
        if with_basis:
            d = {"basis": self.basis.to_json(), **d}
        return d

    @classmethod
    def from_json(cls, data: dict, basis: Basis | None = None) -> "Fiet":
        if basis is None:
            basis = Basis.from_json(data.get("basis", {}))
        raw = []
        for p in data["pieces"]:
            sign = int(p["sign"])
            if sign not in (1, -1):
                raise ValueError(f"piece sign must be 1 or -1, got {sign}")
            raw.append(Piece(ExactReal.from_json(basis, p["left"]), ExactReal.from_json(basis, p["right"]),
                             sign, ExactReal.from_json(basis, p["offset"])))
        points = data.get("points", [])
        for pt in points:
            x = ExactReal.from_json(basis, pt[0])
            y = ExactReal.from_json(basis, pt[1])
            if x.sign() < 0 or x.compare(1) >= 0 or y.sign() < 0 or y.compare(1) >= 0:
                raise ValueError("point values must lie in [0, 1)")
        return canonicalize(basis, raw)


@dataclass(frozen=True)
class CombinatorialDescription:
    """``(lambda, pi)`` plus the flip vector; ``perm[i]`` is the 0-based image slot of piece ``i``."""

    lengths: tuple
    perm: tuple
    flips: tuple

    @property
    def m(self) -> int:
        return len(self.lengths)

    def a(self) -> list[ExactReal]:
        out, acc = [], self.lengths[0].basis.zero
        for lam in self.lengths:
            out.append(acc)
            acc = acc + lam
        return out

    def delta(self) -> list[ExactReal]:
        """Translations from lengths and permutation only (no map evaluation)."""
        m = self.m
        inv = [0] * m
        for i, j in enumerate(self.perm):
            inv[j] = i
        slot_start, acc = [None] * m, self.lengths[0].basis.zero
        for j in range(m):
            slot_start[j] = acc
            acc = acc + self.lengths[inv[j]]
        a = self.a()
        return [slot_start[self.perm[i]] - a[i] for i in range(m)]


# ---------------------------------------------------------------------------
# construction


def _as_real(basis: Basis, x) -> ExactReal:
    return x if isinstance(x, ExactReal) else basis.const(x)


def canonicalize(basis: Basis, pieces: Iterable[Piece]) -> Fiet:
    """Sort, validate coverage and bijectivity, and merge a raw piece list."""
    ps = [Piece(_as_real(basis, p.left), _as_real(basis, p.right), p.sign, _as_real(basis, p.offset))
          for p in pieces]
    for p in ps:
        for v in (p.left, p.right, p.offset):
            if v.basis is not basis and v.basis != basis:
                raise BasisMismatch("piece data on a foreign basis")
        if p.left.compare(p.right) >= 0:
            raise OverlappingPieces(f"empty or reversed piece ({p.left}, {p.right})")
        if p.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
    if not ps:
        raise CoverageGap("no pieces")
    ps.sort(key=lambda q: _key(q.left))
    _check_tiling(ps, (lambda q: (q.left, q.right)), CoverageGap, OverlappingPieces)
    images = sorted((q.image() for q in ps), key=lambda uv: _key(uv[0]))
    _check_tiling(images, (lambda uv: uv), ImagesNotTiling, ImagesNotTiling)
    return Fiet(basis, _merge(ps), _trusted=True)


def _check_tiling(items, ends, gap_exc, overlap_exc) -> None:
    first = ends(items[0])[0]
    if first.sign() != 0:
        raise gap_exc(f"intervals start at {first}, not 0")
    for a, b in zip(items, items[1:]):
        r, l = ends(a)[1], ends(b)[0]
        c = r.compare(l)
        if c < 0:
            raise gap_exc(f"gap between {r} and {l}")
        if c > 0:
            raise overlap_exc(f"overlap at {l}")
    last = ends(items[-1])[1]
    if last.compare(1) != 0:
        raise gap_exc(f"intervals end at {last}, not 1")


def identity(basis: Basis) -> Fiet:
    return Fiet(basis, [Piece(basis.zero, basis.one, 1, basis.zero)], _trusted=True)


def from_combinatorics(lengths: Sequence, perm: Sequence[int], flips: Sequence[int] | None = None,
                       basis: Basis | None = None) -> Fiet:
    """Build the map sending piece ``i`` onto image slot ``perm[i]`` (0-based)."""
    if basis is None:
        basis = next(x.basis for x in lengths if isinstance(x, ExactReal))
    lam = [_as_real(basis, x) for x in lengths]
    m = len(lam)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm} is not a permutation of 0..{m - 1}")
    flips = flips or [1] * m
    inv = [0] * m
    for i, j in enumerate(perm):
        inv[j] = i
    slot, acc = [None] * m, basis.zero
    for j in range(m):
        slot[j] = acc
        acc = acc + lam[inv[j]]
    raw, a = [], basis.zero
    for i in range(m):
        b = slot[perm[i]]
        r = a + lam[i]
        if flips[i] == 1:
            raw.append(Piece(a, r, 1, b - a))
        else:
            raw.append(Piece(a, r, -1, b + r))
        a = r
    return canonicalize(basis, raw)


def rotation(a: ExactReal, basis: Basis | None = None) -> Fiet:
    """``R_a``: ``x -> x + a mod 1``; ``a`` is the image of 0."""
    basis = basis or a.basis
    a = _as_real(basis, a)
    if a.sign() < 0 or a.compare(1) >= 0:
        raise ParameterOutOfRange(f"rotation angle {a} outside [0, 1)")
    return restricted_rotation(a, (basis.zero, basis.one))


def restricted_rotation(alpha, J, basis: Basis | None = None) -> Fiet:
    """``R_{alpha,J}``: rotation by ``alpha`` modulo ``|J|`` on ``J = [a, b)``, identity elsewhere."""
    basis = basis or next(x.basis for x in (alpha, *J) if isinstance(x, ExactReal))
    alpha = _as_real(basis, alpha)
    a, b = (_as_real(basis, x) for x in J)
    _check_interval(a, b)
    L = b - a
    if alpha.sign() < 0 or alpha.compare(L) >= 0:
        raise ParameterOutOfRange(f"angle {alpha} outside [0, {L})")
    if alpha.is_zero():
        return identity(basis)
    raw = []
    if a.sign() > 0:
        raw.append(Piece(basis.zero, a, 1, basis.zero))
    cut = b - alpha
    raw.append(Piece(a, cut, 1, alpha))
    raw.append(Piece(cut, b, 1, alpha - L))
    if b.compare(1) < 0:
        raw.append(Piece(b, basis.one, 1, basis.zero))
    return Fiet._build(basis, raw)


def symmetry(J, basis: Basis | None = None) -> Fiet:
    """``I_J``: ``x -> a + b - x`` on ``J``, identity elsewhere."""
    basis = basis or next(x.basis for x in J if isinstance(x, ExactReal))
    a, b = (_as_real(basis, x) for x in J)
    _check_interval(a, b)
    raw = []
    if a.sign() > 0:
        raw.append(Piece(basis.zero, a, 1, basis.zero))
    raw.append(Piece(a, b, -1, a + b))
    if b.compare(1) < 0:
        raw.append(Piece(b, basis.one, 1, basis.zero))
    return Fiet._build(basis, raw)


def symmetry_S(theta, J=None, basis: Basis | None = None) -> Fiet:
    """``S_{theta,J} = I_[a,theta] o I_(theta,b)``; on [0, 1) this is ``x -> theta - x mod 1``."""
    basis = basis or next(x.basis for x in (theta, *(J or ())) if isinstance(x, ExactReal))
    theta = _as_real(basis, theta)
    a, b = (basis.zero, basis.one) if J is None else (_as_real(basis, x) for x in J)
    _check_interval(a, b)
    if theta.compare(a) < 0 or theta.compare(b) >= 0:
        raise ParameterOutOfRange(f"theta {theta} outside [{a}, {b})")
    raw = []
    if a.sign() > 0:
        raw.append(Piece(basis.zero, a, 1, basis.zero))
    if theta.compare(a) > 0:
        raw.append(Piece(a, theta, -1, a + theta))
    raw.append(Piece(theta, b, -1, theta + b))
    if b.compare(1) < 0:
        raw.append(Piece(b, basis.one, 1, basis.zero))
    return Fiet._build(basis, raw)


def swap_halves(J, basis: Basis | None = None) -> Fiet:
    """The half-length restricted rotation of ``J``; an involution exchanging its halves."""
    basis = basis or next(x.basis for x in J if isinstance(x, ExactReal))
    a, b = (_as_real(basis, x) for x in J)
    return restricted_rotation((b - a) / 2, (a, b))


def _check_interval(a: ExactReal, b: ExactReal) -> None:
    if a.sign() < 0 or b.compare(1) > 0 or a.compare(b) >= 0:
        raise ParameterOutOfRange(f"[{a}, {b}) is not a subinterval of [0, 1)")


def restrict(f: Fiet, J) -> list[Piece]:
    """Pieces of ``f`` inside ``J``; ``f`` must be the identity outside ``J``."""
    a, b = (_as_real(f.basis, x) for x in J)
    if not f.support_within(a, b):
        raise DomainMismatch(f"map is not supported in [{a}, {b})")
    out = []
    for p in f.cut([a, b]):
        if p.left.compare(a) >= 0 and p.right.compare(b) <= 0:
            out.append(p)
    return out


def rational_ratio(num: ExactReal, den: ExactReal) -> mpq:
    """``num / den`` when it is rational, else :class:`IrrationalScale`."""
    k = None
    for x, y in zip(num.c, den.c):
        if y:
            q = x / y
            if k is None:
                k = q
            elif q != k:
                raise IrrationalScale(f"{num} / {den} is not rational")
        elif x:
            raise IrrationalScale(f"{num} / {den} is not rational")
    if k is None:
        raise IrrationalScale("zero-length interval")
    return k


def transport(f: Fiet, J, K) -> Fiet:
    """Conjugate ``f`` (supported in ``J``) by the direct homothety ``J -> K``."""
    basis = f.basis
    ja, jb = (_as_real(basis, x) for x in J)
    ka, kb = (_as_real(basis, x) for x in K)
    _check_interval(ja, jb)
    _check_interval(ka, kb)
    k = rational_ratio(kb - ka, jb - ja)
    inner = restrict(f, (ja, jb))
    raw = []
    if ka.sign() > 0:
        raw.append(Piece(basis.zero, ka, 1, basis.zero))
    for p in inner:
        off = ka + (ja * p.sign + p.offset - ja) * k - ka * p.sign
        raw.append(Piece(ka + (p.left - ja) * k, ka + (p.right - ja) * k, p.sign, off))
    if kb.compare(1) < 0:
        raw.append(Piece(kb, basis.one, 1, basis.zero))
    return Fiet._build(basis, raw)


def metric_d(f: Fiet, g: Fiet) -> ExactReal:
    """``sum |lambda_i(f) - lambda_i(g)|`` on maps with the same ``m`` and permutation."""
    f._check(g)
    if not (f.is_flip_free() and g.is_flip_free()):
        raise DomainMismatch("the metric is defined on flip-free maps")
    cf, cg = f.combinatorics(), g.combinatorics()
    if cf.perm != cg.perm:
        raise DomainMismatch("maps have different combinatorics")
    total = f.basis.zero
    for x, y in zip(cf.lengths, cg.lengths):
        total = total + abs(x - y)
    return total
