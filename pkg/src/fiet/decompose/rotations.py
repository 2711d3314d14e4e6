"""Restricted rotations: greedy factorization and their witnesses."""

from __future__ import annotations

from ..certificate import (Certificate, CommutatorWitness, Factor, Kind,
                           RestrictedRotationWitness, StrongReversalWitness)
from ..core import Fiet, identity, restricted_rotation, symmetry, symmetry_S
from .flips import disjoint_product


class NotFlipFree(ValueError):
    pass


def peel_rotations(g: Fiet) -> list[RestrictedRotationWitness]:
    """Restricted rotations ``R_1, ..., R_k`` with ``g = R_1 o ... o R_k``.

    At each step the first non-fixed piece, sitting at ``a`` with image
    ``[y, y + lam)``, is sent home by ``R = R_{lam, [a, y + lam)}``; the
    factor recorded is ``R^-1``.  At most ``m - 1`` steps are needed.
    """
    if not g.is_flip_free():
        raise NotFlipFree("restricted rotation factorization needs a flip-free map")
    basis = g.basis
    out = []
    cur = g
    while not cur.is_identity():
        piece = next(p for p in cur.pieces if not p.is_identity())
        a = piece.left
        lam = piece.length()
        y = a + piece.offset
        end = y + lam
        R = restricted_rotation(lam, (a, end), basis)
        cur = R.compose(cur)
        out.append(RestrictedRotationWitness(end - a - lam, a, end))
    return out


def rotation_value(w: RestrictedRotationWitness) -> Fiet:
    return restricted_rotation(w.alpha, (w.left, w.right), w.alpha.basis)


def to_restricted_rotations(g: Fiet) -> Certificate:
    factors = [Factor(rotation_value(w), w) for w in peel_rotations(g)]
    return Certificate(g, Kind.ROTATIONS, factors, {"m": len(g)})


def restricted_rotation_as_commutator(alpha, J, basis=None) -> CommutatorWitness:
    """``R_{alpha,J} = [S_{a,J}, R_{|J| - alpha/2, J}]`` with ``a`` the left end of ``J``."""
    a, b = J
    basis = basis or a.basis
    if alpha.is_zero():
        return CommutatorWitness(identity(basis), identity(basis))
    L = b - a
    return CommutatorWitness(symmetry_S(a, (a, b), basis), restricted_rotation(L - alpha / 2, (a, b), basis))


def rotations_as_commutator(basis, rots: list[RestrictedRotationWitness]) -> CommutatorWitness:
    """One witness for a product of restricted rotations with disjoint supports."""
    ws = [restricted_rotation_as_commutator(w.alpha, (w.left, w.right), basis) for w in rots]
    return CommutatorWitness(disjoint_product(basis, [w.a for w in ws]),
                             disjoint_product(basis, [w.b for w in ws]))


def restricted_rotation_reversal(alpha, J, basis=None) -> StrongReversalWitness:
    """``R = I_J o (I_J o R)``; both factors are involutions."""
    a, b = J
    basis = basis or a.basis
    R = restricted_rotation(alpha, (a, b), basis)
    I = symmetry((a, b), basis)
    return StrongReversalWitness(I, I.compose(R))


def rotations_as_strong_reversal(basis, rots: list[RestrictedRotationWitness]) -> StrongReversalWitness:
    I = disjoint_product(basis, [symmetry((w.left, w.right), basis) for w in rots])
    value = disjoint_product(basis, [rotation_value(w) for w in rots])
    return StrongReversalWitness(I, I.compose(value))
