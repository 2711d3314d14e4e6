"""Moving the fixed set of a map to a prefix ``[0, l)`` by conjugation."""

from __future__ import annotations

from ..core import Fiet, Piece, canonicalize, identity


def _components(g: Fiet, lo=None, hi=None) -> list[tuple]:
    """Alternating ``(left, right, fixed)`` runs of pieces inside ``[lo, hi)``."""
    runs = []
    for p in g.pieces:
        if lo is not None and p.right.compare(lo) <= 0:
            continue
        if hi is not None and p.left.compare(hi) >= 0:
            continue
        fixed = p.is_identity()
        if runs and runs[-1][2] == fixed:
            runs[-1] = (runs[-1][0], p.right, fixed)
        else:
            runs.append((p.left, p.right, fixed))
    return runs


def normalize_fixed_set(g: Fiet, within=None) -> tuple[Fiet, Fiet]:
    """Return ``(h, h o g o h^-1)`` with the fixed set of the conjugate equal to ``[c, c + l)``.

    ``h`` sends the fixed components, in order, to the front of ``J = [c, d)``
    and the moving components, in order, after them.  ``within`` restricts
    the construction to an interval ``J`` containing the support of ``g``;
    by default ``J = [0, 1)``.
    """
    basis = g.basis
    if within is None:
        c, d = basis.zero, basis.one
    else:
        c, d = within
    runs = _components(g, c, d)
    # clip the outer runs to J
    if runs:
        runs[0] = (c, runs[0][1], runs[0][2])
        runs[-1] = (runs[-1][0], d, runs[-1][2])
    fixed = [r for r in runs if r[2]]
    moving = [r for r in runs if not r[2]]
    raw = []
    if c.sign() > 0:
        raw.append(Piece(basis.zero, c, 1, basis.zero))
    x = c
    for left, right, _ in fixed + moving:
        raw.append(Piece(left, right, 1, x - left))
        x = x + (right - left)
    if d.compare(1) < 0:
        raw.append(Piece(d, basis.one, 1, basis.zero))
    h = canonicalize(basis, raw)
    if h.is_identity():
        return identity(basis), g
    return h, h.compose(g).compose(h.inverse())
