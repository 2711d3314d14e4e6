"""Constructive decompositions, each returning a replayable certificate."""

from .corner import (CornerResult, EpsilonOutOfRange, corner_support, corner_support_decomposition,
                     fix_increasing_involution, s_n)
from .flips import factor_flips, symmetry_as_commutator
from .normalize import normalize_fixed_set
from .periodic import (NormalForm, periodic_as_commutator, periodic_as_strong_reversal, periodic_normal_form,
                       reverse_periodic, sqrt_of_periodic)
from .pipelines import (PipelineTrace, commutator_decomposition, involution_decomposition,
                        strongly_reversible_decomposition)
from .rotations import (NotFlipFree, peel_rotations, restricted_rotation_as_commutator,
                        restricted_rotation_reversal, to_restricted_rotations)
from .shrink import ShrinkFailed, ShrinkResult, shrink_support
from .vaserstein import SupportNotInRightHalf, rounds_needed, step_count, vaserstein_step

__all__ = [
    "CornerResult", "EpsilonOutOfRange", "NormalForm", "NotFlipFree", "PipelineTrace", "ShrinkFailed",
    "ShrinkResult", "SupportNotInRightHalf", "commutator_decomposition", "corner_support",
    "corner_support_decomposition", "factor_flips", "fix_increasing_involution", "involution_decomposition",
    "normalize_fixed_set", "peel_rotations", "periodic_as_commutator", "periodic_as_strong_reversal",
    "periodic_normal_form", "restricted_rotation_as_commutator", "restricted_rotation_reversal",
    "reverse_periodic", "rounds_needed", "s_n", "shrink_support", "sqrt_of_periodic", "step_count",
    "strongly_reversible_decomposition", "symmetry_as_commutator", "to_restricted_rotations",
    "vaserstein_step",
]
