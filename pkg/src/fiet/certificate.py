"""Certificate schema shared by the decomposition pipelines and the checker.

A certificate stores a target map and an ordered list of factors whose
composition, read left to right, is claimed to equal the target:
``target = factors[0] o factors[1] o ... o factors[-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

from .core import Fiet
from .exactnum import Basis, ExactReal


class Kind(str, Enum):
    ROTATIONS = "rotations"
    COMMUTATORS = "commutators"
    INVOLUTIONS = "involutions"
    STRONGLY_REVERSIBLE = "strong-reversible"
    CORNER_SUPPORT = "corner"


@dataclass(frozen=True)
class CommutatorWitness:
    """``value = a o b o a^-1 o b^-1``."""

    a: Fiet
    b: Fiet
    tag = "commutator"


@dataclass(frozen=True)
class InvolutionWitness:
    """``value o value = id``."""

    tag = "involution"


@dataclass(frozen=True)
class StrongReversalWitness:
    """``value = i1 o i2`` with both ``i1`` and ``i2`` involutions."""

    i1: Fiet
    i2: Fiet
    tag = "strong-reversal"


@dataclass(frozen=True)
class RestrictedRotationWitness:
    """``value = R_{alpha, [left, right)}``."""

    alpha: ExactReal
    left: ExactReal
    right: ExactReal
    tag = "restricted-rotation"


@dataclass(frozen=True)
class PeriodicWitness:
    """``value`` has exact order ``order``."""

    order: int
    tag = "periodic"


@dataclass(frozen=True)
class ConjugateWitness:
    """``value = h o inner o h^-1`` with ``inner`` supported in ``[1 - 1/n, 1)``."""

    h: Fiet
    inner: Fiet
    n: int
    tag = "conjugate"


Witness = Union[CommutatorWitness, InvolutionWitness, StrongReversalWitness,
                RestrictedRotationWitness, PeriodicWitness, ConjugateWitness]


@dataclass(frozen=True)
class Factor:
    value: Fiet
    witness: Witness


@dataclass
class Certificate:
    target: Fiet
    kind: Kind
    factors: list[Factor]
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self):
        return len(self.factors)

    def count(self) -> int:
        """Number of non-identity factors."""
        return sum(1 for f in self.factors if not f.value.is_identity())

    def values(self) -> list[Fiet]:
        return [f.value for f in self.factors]

    # JSON ------------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "basis": self.target.basis.to_json(),
            "kind": self.kind.value,
            "target": self.target.to_json(with_basis=False),
            "factors": [
                {"value": f.value.to_json(with_basis=False), "witness": _witness_to_json(f.witness)}
                for f in self.factors
            ],
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, data: dict, basis: Basis | None = None) -> "Certificate":
        if basis is None:
            basis = Basis.from_json(data.get("basis", {}))
        target = Fiet.from_json(data["target"], basis)
        factors = [Factor(Fiet.from_json(f["value"], basis), _witness_from_json(f["witness"], basis))
                   for f in data["factors"]]
        return cls(target, Kind(data["kind"]), factors, dict(data.get("meta", {})))


def _witness_to_json(w: Witness) -> dict:
    if isinstance(w, CommutatorWitness):
        return {"type": w.tag, "a": w.a.to_json(False), "b": w.b.to_json(False)}
    if isinstance(w, InvolutionWitness):
        return {"type": w.tag}
    if isinstance(w, StrongReversalWitness):
        return {"type": w.tag, "i1": w.i1.to_json(False), "i2": w.i2.to_json(False)}
    if isinstance(w, RestrictedRotationWitness):
        return {"type": w.tag, "alpha": w.alpha.to_json(), "interval": [w.left.to_json(), w.right.to_json()]}
    if isinstance(w, PeriodicWitness):
        return {"type": w.tag, "order": w.order}
    if isinstance(w, ConjugateWitness):
        return {"type": w.tag, "h": w.h.to_json(False), "inner": w.inner.to_json(False), "n": w.n}
    raise TypeError(f"unknown witness {w!r}")


def _witness_from_json(d: dict, basis: Basis) -> Witness:
    t = d["type"]
    if t == "commutator":
        return CommutatorWitness(Fiet.from_json(d["a"], basis), Fiet.from_json(d["b"], basis))
    if t == "involution":
        return InvolutionWitness()
    if t == "strong-reversal":
        return StrongReversalWitness(Fiet.from_json(d["i1"], basis), Fiet.from_json(d["i2"], basis))
    if t == "restricted-rotation":
        lo, hi = d["interval"]
        return RestrictedRotationWitness(ExactReal.from_json(basis, d["alpha"]),
                                         ExactReal.from_json(basis, lo), ExactReal.from_json(basis, hi))
    if t == "periodic":
        return PeriodicWitness(int(d["order"]))
    if t == "conjugate":
        return ConjugateWitness(Fiet.from_json(d["h"], basis), Fiet.from_json(d["inner"], basis), int(d["n"]))
    raise ValueError(f"unknown witness type {t!r}")
