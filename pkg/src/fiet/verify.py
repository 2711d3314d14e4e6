"""Independent certificate checker.

Replays a certificate using only the group operations of :mod:`fiet.core`
and the SAF of :mod:`fiet.invariants`; nothing from the decomposition
pipelines is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .certificate import (Certificate, CommutatorWitness, ConjugateWitness, InvolutionWitness, Kind,
                          PeriodicWitness, RestrictedRotationWitness, StrongReversalWitness)
from .core import Fiet, FietError, identity, restricted_rotation
from .invariants import SafInvariant, certify_order, saf


class Reason(str, Enum):
    PRODUCT_MISMATCH = "ProductMismatch"
    WITNESS_MISMATCH = "WitnessMismatch"
    NOT_INVOLUTION = "NotInvolution"
    COUNT_EXCEEDED = "CountExceeded"
    SUPPORT_VIOLATION = "SupportViolation"
    SAF_NONZERO = "SafNonzero"


@dataclass
class Verdict:
    failures: list = field(default_factory=list)   # (factor index or None, Reason, detail)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, index, reason: Reason, detail: str = "") -> None:
        self.failures.append((index, reason, detail))

    def reasons(self) -> set:
        return {r for _, r, _ in self.failures}

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "failures": [{"factor": i, "reason": r.value, "detail": d} for i, r, d in self.failures]}


def bound_for(cert: Certificate) -> int:
    kind = cert.kind
    if kind is Kind.ROTATIONS:
        return max(len(cert.target) - 1, 0)
    if kind is Kind.COMMUTATORS:
        return 5 if cert.target.is_flip_free() else 6
    if kind is Kind.STRONGLY_REVERSIBLE:
        return 6
    if kind is Kind.INVOLUTIONS:
        return 12
    if kind is Kind.CORNER_SUPPORT:
        return int(cert.meta.get("s_n", 0)) + 1
    raise ValueError(kind)


def _is_involution(f: Fiet) -> bool:
    return f.compose(f).is_identity()


def _commutator(a: Fiet, b: Fiet) -> Fiet:
    return a.compose(b).compose(a.inverse()).compose(b.inverse())


def _check_witness(v: Verdict, i: int, value: Fiet, w) -> None:
    if isinstance(w, CommutatorWitness):
        if _commutator(w.a, w.b) != value:
            v.fail(i, Reason.WITNESS_MISMATCH, "[a, b] differs from the factor")
    elif isinstance(w, StrongReversalWitness):
        if not _is_involution(w.i1) or not _is_involution(w.i2):
            v.fail(i, Reason.NOT_INVOLUTION, "strong-reversal witness is not a pair of involutions")
        if w.i1.compose(w.i2) != value:
            v.fail(i, Reason.WITNESS_MISMATCH, "i1 o i2 differs from the factor")
    elif isinstance(w, InvolutionWitness):
        if not _is_involution(value):
            v.fail(i, Reason.NOT_INVOLUTION, "factor does not square to the identity")
    elif isinstance(w, RestrictedRotationWitness):
        try:
            R = restricted_rotation(w.alpha, (w.left, w.right), value.basis)
        except FietError as exc:
            v.fail(i, Reason.WITNESS_MISMATCH, str(exc))
            return
        if R != value:
            v.fail(i, Reason.WITNESS_MISMATCH, "restricted rotation parameters do not rebuild the factor")
    elif isinstance(w, PeriodicWitness):
        if not certify_order(value, w.order):
            v.fail(i, Reason.WITNESS_MISMATCH, f"factor does not have order {w.order}")
    elif isinstance(w, ConjugateWitness):
        if w.h.compose(w.inner).compose(w.h.inverse()) != value:
            v.fail(i, Reason.WITNESS_MISMATCH, "h o g o h^-1 differs from the factor")
        one = value.basis.one
        if not w.inner.support_within(one - one / w.n, one):
            v.fail(i, Reason.SUPPORT_VIOLATION, f"inner map leaves [1 - 1/{w.n}, 1)")
    else:
        v.fail(i, Reason.WITNESS_MISMATCH, f"unknown witness {type(w).__name__}")


_EXPECTED = {
    Kind.ROTATIONS: (RestrictedRotationWitness,),
    Kind.COMMUTATORS: (CommutatorWitness,),
    Kind.STRONGLY_REVERSIBLE: (StrongReversalWitness,),
    Kind.INVOLUTIONS: (InvolutionWitness,),
}


def _check_saf(v: Verdict, cert: Certificate) -> None:
    """SAF consistency for commutator certificates of flip-free targets.

    In the quotient group a flip-free map can be a product of commutators
    with nonzero SAF (the witnesses may flip), so the check is additivity
    over flip-free factors, plus vanishing on factors whose witnesses are
    both flip-free.
    """
    values = cert.values()
    if not all(f.is_flip_free() for f in values):
        return
    total = SafInvariant.zero(cert.target.basis.dim)
    for i, f in enumerate(cert.factors):
        s = saf(f.value)
        total = total + s
        w = f.witness
        if isinstance(w, CommutatorWitness) and w.a.is_flip_free() and w.b.is_flip_free() and not s.is_zero():
            v.fail(i, Reason.SAF_NONZERO, "flip-free commutator with nonzero SAF")
    if total != saf(cert.target):
        v.fail(None, Reason.SAF_NONZERO, "SAF of the target differs from the sum over factors")


def verify(cert: Certificate) -> Verdict:
    v = Verdict()
    target = cert.target
    basis = target.basis
    prod = identity(basis)
    for f in cert.factors:
        prod = prod.compose(f.value)
    if prod != target:
        v.fail(None, Reason.PRODUCT_MISMATCH, "product of factors differs from the target")
    expected = _EXPECTED.get(cert.kind)
    for i, f in enumerate(cert.factors):
        if expected is not None and not isinstance(f.witness, expected):
            v.fail(i, Reason.WITNESS_MISMATCH, f"{cert.kind.value} certificate holds a {f.witness.tag} witness")
        _check_witness(v, i, f.value, f.witness)
        if cert.kind is Kind.INVOLUTIONS and not isinstance(f.witness, InvolutionWitness):
            if not _is_involution(f.value):
                v.fail(i, Reason.NOT_INVOLUTION, "factor does not square to the identity")
    if cert.kind is Kind.CORNER_SUPPORT:
        _check_corner(v, cert)
    elif cert.count() > bound_for(cert):
        v.fail(None, Reason.COUNT_EXCEEDED, f"{cert.count()} factors exceed the bound {bound_for(cert)}")
    if cert.kind is Kind.COMMUTATORS and target.is_flip_free():
        _check_saf(v, cert)
    return v


def _check_corner(v: Verdict, cert: Certificate) -> None:
    s = int(cert.meta.get("s_n", 0))
    n = int(cert.meta.get("n", 0))
    k = 1
    while 5 ** k <= n * 4 ** k:
        k += 1
    if s != k:
        v.fail(None, Reason.COUNT_EXCEEDED, f"s_n recorded as {s}, expected {k} for n = {n}")
    invs = cert.factors[:-1]
    if len(invs) != s:
        v.fail(None, Reason.COUNT_EXCEEDED, f"{len(invs)} involutions, expected exactly {s}")
    for i, f in enumerate(invs):
        if not isinstance(f.witness, InvolutionWitness):
            v.fail(i, Reason.WITNESS_MISMATCH, "corner certificate expects involutions first")
    if not cert.factors or not isinstance(cert.factors[-1].witness, ConjugateWitness):
        v.fail(len(cert.factors) - 1, Reason.WITNESS_MISMATCH, "last factor must be h o g_n o h^-1")
    elif cert.factors[-1].witness.n != n:
        v.fail(len(cert.factors) - 1, Reason.SUPPORT_VIOLATION, "support bound differs from n")
