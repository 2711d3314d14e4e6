import dataclasses

from gmpy2 import mpq

from fiet.certificate import (Certificate, CommutatorWitness, ConjugateWitness, Factor, InvolutionWitness, Kind,
                              StrongReversalWitness)
from fiet.core import identity, restricted_rotation, rotation, symmetry
from fiet.decompose import (commutator_decomposition, corner_support_decomposition, involution_decomposition,
                            strongly_reversible_decomposition, to_restricted_rotations)
from fiet.verify import Reason, verify

from conftest import B2, Q, sample


def perturb(cert, k, value):
    factors = list(cert.factors)
    factors[k] = dataclasses.replace(factors[k], value=value)
    return dataclasses.replace(cert, factors=factors)


def r17(basis):
    return rotation(basis.const(mpq(1, 7)), basis)


def test_valid_commutator_certificate():
    c = commutator_decomposition(sample(2, flips=True))
    assert 0 < c.count() <= 6
    v = verify(c)
    assert v.ok and v.failures == []


def test_replaced_factor_is_product_mismatch():
    c = commutator_decomposition(sample(2, flips=True))
    bad = perturb(c, 0, r17(B2))
    v = verify(bad)
    assert not v.ok
    assert Reason.PRODUCT_MISMATCH in v.reasons()


def test_non_involution_in_involution_certificate():
    c = involution_decomposition(sample(3, flips=True))
    bad = perturb(c, 1, r17(B2))
    assert {Reason.NOT_INVOLUTION, Reason.PRODUCT_MISMATCH} <= verify(bad).reasons()


def test_wrong_witness_kind_and_bad_witness():
    c = commutator_decomposition(sample(4))
    f0 = c.factors[0]
    swapped = dataclasses.replace(f0, witness=CommutatorWitness(f0.witness.b, f0.witness.a))
    bad = dataclasses.replace(c, factors=[swapped, *c.factors[1:]])
    assert Reason.WITNESS_MISMATCH in verify(bad).reasons()
    bad = dataclasses.replace(c, factors=[dataclasses.replace(f0, witness=InvolutionWitness()), *c.factors[1:]])
    assert Reason.WITNESS_MISMATCH in verify(bad).reasons()


def test_count_bound():
    R = restricted_rotation(mpq(1, 8), (mpq(1, 2), 1), Q)
    I = symmetry((mpq(1, 2), 1), Q)
    sr = StrongReversalWitness(I, I.compose(R))
    # R^8 = id, written as eight strongly reversible factors
    factors = [Factor(R, sr)] * 8
    c = Certificate(identity(Q), Kind.STRONGLY_REVERSIBLE, factors)
    v = verify(c)
    assert v.reasons() == {Reason.COUNT_EXCEEDED}
    rot = to_restricted_rotations(sample(6, mmax=5))
    assert verify(rot).ok


def test_corner_support_violation():
    f = sample(8, mmax=5)
    c = corner_support_decomposition(f, 2)
    assert verify(c).ok
    last = c.factors[-1]
    w = last.witness
    moved = ConjugateWitness(w.h, w.inner, 4)
    bad = dataclasses.replace(c, factors=[*c.factors[:-1], dataclasses.replace(last, witness=moved)])
    assert Reason.SUPPORT_VIOLATION in verify(bad).reasons()
    short = dataclasses.replace(c, factors=c.factors[1:])
    assert Reason.COUNT_EXCEEDED in verify(short).reasons()


def test_saf_additivity_check():
    a = rotation(B2.element(["0", "1/2"]))
    # a flip-free "commutator" claim whose value carries nonzero SAF
    fake = Factor(a, CommutatorWitness(identity(B2), identity(B2)))
    c = Certificate(a, Kind.COMMUTATORS, [fake])
    reasons = verify(c).reasons()
    assert Reason.SAF_NONZERO in reasons and Reason.WITNESS_MISMATCH in reasons


def test_every_single_factor_mutation_is_rejected():
    for seed in range(6):
        F = sample(seed, flips=seed % 2 == 0)
        for cert in (commutator_decomposition(F), strongly_reversible_decomposition(F),
                     involution_decomposition(F)):
            for k in range(len(cert.factors)):
                for other in (r17(B2), cert.factors[k].value.inverse(), identity(B2)):
                    if other == cert.factors[k].value:
                        continue
                    assert not verify(perturb(cert, k, other)).ok


def test_json_round_trip_and_verdict_json():
    for cert in (commutator_decomposition(sample(9, flips=True)), corner_support_decomposition(sample(9), 2)):
        again = Certificate.from_json(cert.to_json())
        assert again.to_json() == cert.to_json()
        assert verify(again).ok
        assert verify(again).to_json() == {"ok": True, "failures": []}
