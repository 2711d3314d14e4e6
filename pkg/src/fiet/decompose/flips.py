"""Splitting off the flips: ``F = g o iota`` with ``g`` flip-free."""

from __future__ import annotations

from functools import cmp_to_key

from ..certificate import CommutatorWitness
from ..core import Fiet, Piece, identity, restricted_rotation, symmetry

_by_left = cmp_to_key(lambda p, q: p.left.compare(q.left))


def symmetry_as_commutator(J, basis=None) -> CommutatorWitness:
    """``I_J = [f1, R_{|J|/2, J}]`` where ``f1`` flips the middle half of ``J``."""
    a, b = J
    basis = basis or a.basis
    L = b - a
    f1 = symmetry((a + L / 4, b - L / 4), basis)
    return CommutatorWitness(f1, restricted_rotation(L / 2, (a, b), basis))


def _disjoint_product(basis, parts: list[Fiet]) -> Fiet:
    """Product of maps with pairwise disjoint supports, assembled piecewise."""
    raw = []
    for f in parts:
        raw.extend(p for p in f.pieces if not p.is_identity())
    out, x = [], basis.zero
    for p in sorted(raw, key=_by_left):
        if p.left.compare(x) > 0:
            out.append(Piece(x, p.left, 1, basis.zero))
        out.append(p)
        x = p.right
    if x.compare(1) < 0:
        out.append(Piece(x, basis.one, 1, basis.zero))
    return Fiet(basis, out)


def disjoint_product(basis, parts: list[Fiet]) -> Fiet:
    parts = [f for f in parts if not f.is_identity()]
    if not parts:
        return identity(basis)
    if len(parts) == 1:
        return parts[0]
    return _disjoint_product(basis, parts)


def factor_flips(F: Fiet) -> tuple[Fiet, Fiet, CommutatorWitness | None]:
    """Return ``(g, iota, witness)`` with ``F = g o iota`` and ``witness`` replaying ``iota``."""
    basis = F.basis
    blocks = [(p.left, p.right) for p in F.pieces if p.sign == -1]
    if not blocks:
        return F, identity(basis), None
    iota = disjoint_product(basis, [symmetry(J, basis) for J in blocks])
    g = F.compose(iota)
    ws = [symmetry_as_commutator(J, basis) for J in blocks]
    witness = CommutatorWitness(disjoint_product(basis, [w.a for w in ws]),
                                disjoint_product(basis, [w.b for w in ws]))
    return g, iota, witness
