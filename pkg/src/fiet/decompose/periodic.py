"""Periodic maps: normal form, square roots, reversers, commutator witnesses.

A periodic flip-free map permutes the cells cut out by the orbits of its
breakpoints.  Every cycle of cells becomes one block of the normal form, on
which the conjugated map is a finite-order restricted rotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key

from ..certificate import CommutatorWitness, StrongReversalWitness
from ..core import Fiet, Piece, canonicalize, identity, restricted_rotation
from ..exactnum import ExactReal
from ..invariants import NotPeriodic
from .flips import disjoint_product

MAX_CELLS = 1 << 20

_key = cmp_to_key(lambda x, y: x.compare(y))


@dataclass(frozen=True)
class CellCycles:
    cuts: list            # left endpoints of the cells, sorted
    lengths: list         # cell lengths
    succ: list            # succ[k] = index of the cell p maps cell k onto
    cycles: list          # each cycle listed from its leftmost cell along p


def cell_cycles(p: Fiet, max_cells: int = MAX_CELLS) -> CellCycles:
    if not p.is_flip_free():
        raise NotPeriodic("periodic normal form is defined for flip-free maps")
    seen = {x.c: x for x in p.lefts()}
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for x in frontier:
            y = p(x)
            if y.c not in seen:
                seen[y.c] = y
                nxt.append(y)
        if len(seen) > max_cells:
            raise NotPeriodic(f"breakpoint orbits exceed {max_cells} points")
        frontier = nxt
    pts = list(seen.values())
    if all(x.is_rational() for x in pts):
        pts.sort(key=lambda x: x.c[0])
    else:
        pts.sort(key=_key)
    index = {x.c: i for i, x in enumerate(pts)}
    one = p.basis.one
    lengths = [(pts[i + 1] if i + 1 < len(pts) else one) - pts[i] for i in range(len(pts))]
    succ = [index[p(x).c] for x in pts]
    visited = bytearray(len(pts))
    cycles = []
    for k in range(len(pts)):
        if visited[k]:
            continue
        cyc, j = [], k
        while not visited[j]:
            visited[j] = 1
            cyc.append(j)
            j = succ[j]
        if j != k:
            raise NotPeriodic("cell map is not a permutation")
        cycles.append(cyc)
    return CellCycles(pts, lengths, succ, cycles)


@dataclass(frozen=True)
class Block:
    left: ExactReal
    right: ExactReal
    angle: ExactReal

    def rotation(self) -> Fiet:
        return restricted_rotation(self.angle, (self.left, self.right), self.left.basis)


@dataclass(frozen=True)
class NormalForm:
    """``h o p o h^-1 = product of the block rotations``."""

    h: Fiet
    blocks: list

    def components(self) -> list[Fiet]:
        return [b.rotation() for b in self.blocks]

    def product(self) -> Fiet:
        return disjoint_product(self.h.basis, self.components())


def periodic_normal_form(p: Fiet) -> NormalForm:
    basis = p.basis
    if p.is_identity():
        return NormalForm(identity(basis), [])
    cc = cell_cycles(p)
    raw, blocks = [], []
    start = basis.zero
    for cyc in cc.cycles:
        L = len(cyc)
        ell = cc.lengths[cyc[0]]
        spatial = sorted(cyc)
        rank = {c: r for r, c in enumerate(spatial)}
        shift = (rank[cc.succ[cyc[0]]] - rank[cyc[0]]) % L
        if all((rank[cc.succ[c]] - rank[c]) % L == shift for c in cyc):
            slots, angle = spatial, ell * shift
        else:
            slots, angle = cyc, ell
        for s, c in enumerate(slots):
            target = start + ell * s
            raw.append(Piece(cc.cuts[c], cc.cuts[c] + ell, 1, target - cc.cuts[c]))
        end = start + ell * L
        if L > 1:
            blocks.append(Block(start, end, angle))
        start = end
    return NormalForm(canonicalize(basis, raw), blocks)


def sqrt_of_periodic(p: Fiet) -> Fiet:
    """A periodic ``q`` with ``q o q = p``: halve every block angle of the normal form."""
    if p.is_identity():
        return p
    nf = periodic_normal_form(p)
    half = disjoint_product(p.basis, [Block(b.left, b.right, b.angle / 2).rotation() for b in nf.blocks])
    return nf.h.inverse().compose(half).compose(nf.h)


def reverse_periodic(q: Fiet) -> Fiet:
    """An involution ``h`` with ``h o q o h^-1 = q^-1``: cell ``c_t`` goes to ``c_{-t}``."""
    basis = q.basis
    if q.compose(q).is_identity():
        return identity(basis)
    cc = cell_cycles(q)
    raw = []
    for cyc in cc.cycles:
        L = len(cyc)
        for t, c in enumerate(cyc):
            d = cyc[(-t) % L]
            raw.append(Piece(cc.cuts[c], cc.cuts[c] + cc.lengths[c], 1, cc.cuts[d] - cc.cuts[c]))
    return canonicalize(basis, raw)


def periodic_as_commutator(p: Fiet) -> CommutatorWitness:
    """``p = [q, h]`` with ``q^2 = p`` and ``h`` reversing ``q``."""
    if p.is_identity():
        return CommutatorWitness(p, p)
    q = sqrt_of_periodic(p)
    return CommutatorWitness(q, reverse_periodic(q))


def periodic_as_strong_reversal(p: Fiet) -> StrongReversalWitness:
    """``p = h o (h o p)`` with ``h`` the reverser of ``p``."""
    if p.is_identity():
        return StrongReversalWitness(p, p)
    h = reverse_periodic(p)
    return StrongReversalWitness(h, h.compose(p))
