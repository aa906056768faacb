"""Belief-function fusion on power-set frames.

Core objects live in ``belfuse.frame``; combination rules in
``belfuse.rules`` and ``belfuse.emr``; the refinement order in
``belfuse.sharpen``; the logic model in ``belfuse.modal``.
"""

from .frame import (
    Frame,
    FrameError,
    FrameMismatchError,
    InvalidMassError,
    MassFunction,
    Proposition,
    credibility,
    credibility_table,
    is_probabilistic,
    is_probability_density,
    plausibility,
    prop_and,
    prop_not,
    prop_or,
    prop_subset,
    total_ignorance,
    validate_mass,
)
from .rules import (
    RedistributionFunction,
    R_ALL_TO_TOP,
    R_DEMPSTER_SHAFER,
    TotalConflictError,
    conflict_degree,
    conjunctive,
    dempster_shafer,
    pcr5,
    redistribute,
)
from .emr import (
    ConvergenceError,
    FusionOutcome,
    FusionRejectedError,
    JointMass,
    SolverConfig,
    disjoint_family_bound,
    dominated_feasible_point,
    emr_fuse,
    entropy,
    feasible_point,
    gradient_step,
    ipf_oracle,
)
from .sharpen import (
    Sharpening,
    compose,
    dominates_pointwise,
    exists_sharpening,
    identity_sharpening,
    is_minimal_probability,
    verify_sharpening,
)

__version__ = "0.1.0"
