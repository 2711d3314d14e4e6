"""Seeded random maps for corpora and property tests."""

from __future__ import annotations

import random
from functools import cmp_to_key

from gmpy2 import mpq

from .core import Fiet, from_combinatorics
from .exactnum import Basis, ExactReal, floor_ratio

_key = cmp_to_key(lambda x, y: x.compare(y))


def _grid_cuts(rng: random.Random, basis: Basis, m: int, grid: int) -> list[ExactReal]:
    if m > grid:
        raise ValueError(f"cannot place {m} pieces on a 1/{grid} grid")
    ks = sorted(rng.sample(range(1, grid), m - 1))
    return [basis.const(mpq(k, grid)) for k in ks]


def _span_cuts(rng: random.Random, basis: Basis, m: int, den: int) -> list[ExactReal]:
    """``m - 1`` distinct points of ``(0, 1)`` with irrational coordinates."""
    seen, out = set(), []
    while len(out) < m - 1:
        coords = [mpq(rng.randrange(den), den)]
        for _ in range(1, basis.dim):
            coords.append(mpq(rng.choice([-1, 1]) * rng.randrange(1, den), den))
        x = basis.element(coords)
        x = x - floor_ratio(x, basis.one)
        if x.is_zero() or x.c in seen:
            continue
        seen.add(x.c)
        out.append(x)
    return sorted(out, key=_key)


def random_fiet(rng: random.Random, m: int, *, grid: int | None = None, basis: Basis | None = None,
                flips: bool = False, den: int = 16) -> Fiet:
    """A random map with ``m`` pieces before canonical merging.

    With ``grid`` the breakpoints lie on the ``1/grid`` lattice, otherwise
    they are random points of the span of ``basis``.
    """
    if basis is None:
        basis = Basis()
    if m < 1:
        raise ValueError("m must be positive")
    if grid is not None:
        cuts = _grid_cuts(rng, basis, m, grid)
    else:
        cuts = _span_cuts(rng, basis, m, den)
    pts = [basis.zero] + cuts + [basis.one]
    lengths = [pts[i + 1] - pts[i] for i in range(m)]
    perm = list(range(m))
    rng.shuffle(perm)
    signs = [rng.choice([1, -1]) for _ in range(m)] if flips else None
    return from_combinatorics(lengths, perm, signs, basis=basis)


def random_periodic(rng: random.Random, m: int, grid: int = 12, basis: Basis | None = None) -> Fiet:
    """A random rational flip-free map; rational maps are periodic."""
    return random_fiet(rng, m, grid=grid, basis=basis)
