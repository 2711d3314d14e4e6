"""Headline decompositions: commutators, strongly reversible maps, involutions.

All three share one pipeline.  For ``F`` with flips, ``F = g o iota``.
For the flip-free part,

    g = p^-1 o (h^-1 o g' o h) o p'^-1

where ``p``, ``p'`` are periodic (support shrinking) and ``g'`` is
supported in ``[1 - 2^-t, 1)`` (fixed set moved to a prefix).  ``g'`` is
split into restricted rotations, which are compressed by ``t`` rounds of
the Vaserstein step down to at most three factors.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..certificate import (Certificate, CommutatorWitness, Factor, InvolutionWitness, Kind,
                           StrongReversalWitness)
from ..core import Fiet, identity
from ..invariants import Periodic, is_periodic
from .flips import factor_flips
from .normalize import normalize_fixed_set
from .periodic import periodic_as_commutator, periodic_as_strong_reversal
from .rotations import (peel_rotations, restricted_rotation_as_commutator, restricted_rotation_reversal,
                        rotation_value, rotations_as_commutator, rotations_as_strong_reversal)
from .shrink import ShrinkResult, shrink_support
from .vaserstein import rounds_needed, vaserstein_step

CORNER_TARGET = 3
PERIODIC_PROBE = 32     # powers tried before an irrational map is treated as aperiodic


@dataclass
class PipelineTrace:
    """Intermediate data of one run, kept for inspection and tests."""

    t: int = 0
    shrink: ShrinkResult | None = None
    h: Fiet | None = None
    corner: Fiet | None = None
    rotation_count: int = 0
    counts: list | None = None


def _rotation_factor(kind: Kind, w) -> Factor:
    value = rotation_value(w)
    J = (w.left, w.right)
    if kind is Kind.COMMUTATORS:
        return Factor(value, restricted_rotation_as_commutator(w.alpha, J))
    return Factor(value, restricted_rotation_reversal(w.alpha, J))


def _conjugate_factor(f: Factor, h: Fiet, hinv: Fiet) -> Factor:
    """``h o f o h^-1`` with the witness conjugated alongside."""
    def c(x: Fiet) -> Fiet:
        return x if x.is_identity() else h.compose(x).compose(hinv)

    w = f.witness
    if isinstance(w, CommutatorWitness):
        return Factor(c(f.value), CommutatorWitness(c(w.a), c(w.b)))
    return Factor(c(f.value), StrongReversalWitness(c(w.i1), c(w.i2)))


def _corner(f: Fiet, trace: PipelineTrace):
    """Adaptive dyadic depth: grow ``t`` until ``t`` rounds bring the rotation count to 3."""
    m = len(f)
    t_cap = max(1, rounds_needed(15 * m - 1, CORNER_TARGET))
    t = 1
    while True:
        sh = shrink_support(f, 1 << t)
        h, corner = normalize_fixed_set(sh.g)
        rots = peel_rotations(corner)
        need = rounds_needed(len(rots), CORNER_TARGET)
        if need <= t or t >= t_cap:
            break
        t = min(max(t + 1, need), t_cap)
    trace.t, trace.shrink, trace.h, trace.corner = t, sh, h, corner
    trace.rotation_count = len(rots)
    return t, sh, h, rots


def _shortcut(f: Fiet, kind: Kind) -> Factor | None:
    """One factor when ``f`` is periodic or a single restricted rotation."""
    if isinstance(is_periodic(f, PERIODIC_PROBE), Periodic):
        w = periodic_as_commutator(f) if kind is Kind.COMMUTATORS else periodic_as_strong_reversal(f)
        return Factor(f, w)
    rots = peel_rotations(f)
    if len(rots) == 1:
        return _rotation_factor(kind, rots[0])
    return None


def _flip_free_factors(f: Fiet, kind: Kind, trace: PipelineTrace) -> list[Factor]:
    basis = f.basis
    if f.is_identity():
        return []
    single = _shortcut(f, kind)
    if single is not None:
        return [single]
    t, sh, h, rots = _corner(f, trace)
    factors = [_rotation_factor(kind, w) for w in rots]
    counts = [len(factors)]
    one = basis.one
    for s in range(t, 0, -1):
        if len(factors) <= CORNER_TARGET:
            break
        J = (one - one / (1 << (s - 1)), one)
        factors = vaserstein_step(kind, factors, J)
        counts.append(len(factors))
    trace.counts = counts
    if not h.is_identity():
        hinv = h.inverse()
        factors = [_conjugate_factor(x, hinv, h) for x in factors]
    out = []
    pinv = sh.p.inverse()
    if not pinv.is_identity():
        w = periodic_as_commutator(pinv) if kind is Kind.COMMUTATORS else periodic_as_strong_reversal(pinv)
        out.append(Factor(pinv, w))
    out.extend(x for x in factors if not x.value.is_identity())
    if sh.rotations:
        w = (rotations_as_commutator(basis, sh.rotations) if kind is Kind.COMMUTATORS
             else rotations_as_strong_reversal(basis, sh.rotations))
        out.append(Factor(sh.p_prime.inverse(), w))
    return out


def _decompose(F: Fiet, kind: Kind, trace: PipelineTrace) -> list[Factor]:
    g, iota, witness = factor_flips(F)
    factors = _flip_free_factors(g, kind, trace)
    if not iota.is_identity():
        if kind is Kind.COMMUTATORS:
            factors.append(Factor(iota, witness))
        else:
            factors.append(Factor(iota, StrongReversalWitness(iota, identity(F.basis))))
    return factors


def commutator_decomposition(F: Fiet, trace: PipelineTrace | None = None) -> Certificate:
    """At most six witnessed commutators, five when ``F`` is flip-free."""
    trace = trace if trace is not None else PipelineTrace()
    factors = _decompose(F, Kind.COMMUTATORS, trace)
    return Certificate(F, Kind.COMMUTATORS, factors, _meta(trace))


def strongly_reversible_decomposition(F: Fiet, trace: PipelineTrace | None = None) -> Certificate:
    """At most six factors, each a product of two witnessed involutions."""
    trace = trace if trace is not None else PipelineTrace()
    factors = _decompose(F, Kind.STRONGLY_REVERSIBLE, trace)
    return Certificate(F, Kind.STRONGLY_REVERSIBLE, factors, _meta(trace))


def involution_decomposition(F: Fiet, trace: PipelineTrace | None = None) -> Certificate:
    """At most twelve involutions, obtained by splitting each strongly reversible factor."""
    trace = trace if trace is not None else PipelineTrace()
    factors = []
    for f in _decompose(F, Kind.STRONGLY_REVERSIBLE, trace):
        for part in (f.witness.i1, f.witness.i2):
            if not part.is_identity():
                factors.append(Factor(part, InvolutionWitness()))
    return Certificate(F, Kind.INVOLUTIONS, factors, _meta(trace))


def _meta(trace: PipelineTrace) -> dict:
    meta = {"t": trace.t, "corner_rotations": trace.rotation_count}
    if trace.shrink is not None:
        meta.update(order_p=trace.shrink.order_p, order_p_prime=trace.shrink.order_p_prime, Q=trace.shrink.Q)
    return meta
