"""Dennis-Vaserstein compression of witnessed factors.

Given ``c`` factors supported in the right half ``K`` of ``J``, pair factor
``i`` with the conjugate of factor ``p + i`` by the half swap ``R`` of ``J``
(supports become disjoint, so the pair is again one factor of the same
kind) and collect the rest into a single tail factor.  The output has
``ceil(c/2) + 1`` factors, all supported in ``J``.
"""

from __future__ import annotations

from ..certificate import CommutatorWitness, Factor, Kind, StrongReversalWitness
from ..core import Fiet, identity, swap_halves


class SupportNotInRightHalf(ValueError):
    pass


def step_count(c: int) -> int:
    """Number of factors after one step on ``c`` factors."""
    return 0 if c == 0 else (c + 1) // 2 + 1


def rounds_needed(c: int, target: int = 3) -> int:
    """Iterations of ``c -> ceil(c/2) + 1`` to bring ``c`` down to ``target``."""
    k = 0
    while c > target:
        c = step_count(c)
        k += 1
    return k


def _parts(f: Factor) -> tuple[Fiet, Fiet]:
    w = f.witness
    if isinstance(w, CommutatorWitness):
        return w.a, w.b
    if isinstance(w, StrongReversalWitness):
        return w.i1, w.i2
    raise TypeError(f"cannot compress a factor witnessed by {type(w).__name__}")


def vaserstein_step(kind: Kind, factors: list[Factor], J) -> list[Factor]:
    if kind not in (Kind.COMMUTATORS, Kind.STRONGLY_REVERSIBLE):
        raise ValueError(f"no compression step for {kind}")
    a, b = J
    basis = a.basis
    mid = a + (b - a) / 2
    for i, f in enumerate(factors):
        for part in (f.value, *_parts(f)):
            if not part.support_within(mid, b):
                raise SupportNotInRightHalf(f"factor {i} leaves [{mid}, {b})")
    c = len(factors)
    if c == 0:
        return []
    p = (c + 1) // 2
    one = identity(basis)
    pad = Factor(one, CommutatorWitness(one, one) if kind is Kind.COMMUTATORS else StrongReversalWitness(one, one))
    padded = list(factors) + [pad] * (2 * p - c)
    R = swap_halves((a, b), basis)

    def conj(x: Fiet) -> Fiet:
        return x if x.is_identity() else R.compose(x).compose(R)

    out = []
    for i in range(p):
        left, right = padded[i], padded[p + i]
        l1, l2 = _parts(left)
        r1, r2 = _parts(right)
        value = left.value.compose(conj(right.value))
        w1, w2 = l1.compose(conj(r1)), l2.compose(conj(r2))
        if kind is Kind.COMMUTATORS:
            out.append(Factor(value, CommutatorWitness(w1, w2)))
        else:
            out.append(Factor(value, StrongReversalWitness(w1, w2)))
    X = one
    for f in padded[p:]:
        X = X.compose(f.value)
    Xi = X.inverse()
    tail = R.compose(Xi).compose(R).compose(X)
    if kind is Kind.COMMUTATORS:
        out.append(Factor(tail, CommutatorWitness(R.compose(Xi).compose(R), R)))
    else:
        out.append(Factor(tail, StrongReversalWitness(R, Xi.compose(R).compose(X))))
    return out
