"""Integrability-preserving expectation propagation for linear-mixing models.

The package keeps messages in unnormalized natural-parameter form, allows
non-integrable messages while guaranteeing integrable beliefs, and compares
three strategies for handling improper moment-matching targets: exact
per-edge precision bounds, update skipping, and plain clipping.
"""

from .baselines import (
    PriorGaussianization,
    ep_clip_estimate,
    lmmse_estimate,
    prior_gaussianization,
)
from .benchmark import (
    RunSummary,
    SimConfig,
    TrialResult,
    gen_instance,
    nmse,
    noise_variance,
    prior_factor,
    run_monte_carlo,
    write_results,
)
from .ep import (
    Counters,
    GlmState,
    Mode,
    Posterior,
    SweepReport,
    belief_fz_x_marginal,
    belief_fz_z_marginal,
    init_state,
    run,
    sweep,
)
from .errors import (
    DegenerateVariance,
    GlmEpError,
    InfeasibleThreshold,
    NonIntegrable,
    NonIntegrableBelief,
    NotPD,
    SingularMatrix,
    ThresholdViolation,
    ValidationError,
    ZeroSignal,
)
from .gaussian import (
    GaussMoment1,
    GaussMomentVec,
    GaussNat1,
    GaussNatVec,
    gaussian_reproduction,
    marginalize_linear_delta,
    moment_to_nat,
    nat_to_moment,
    rank_one_pd_threshold,
    rank_one_precision_update,
)
from .gmm import GmmFactor, gmm_belief_moments, gmm_min_precision, gmm_responsibilities
from .model import GlmModel
from .projection import (
    ProjectionInput,
    ProjectionOutput,
    constrained_project,
    kld_objective,
)

__version__ = "0.1.0"

__all__ = [
    "GaussNat1",
    "GaussMoment1",
    "GaussNatVec",
    "GaussMomentVec",
    "nat_to_moment",
    "moment_to_nat",
    "gaussian_reproduction",
    "marginalize_linear_delta",
    "rank_one_pd_threshold",
    "rank_one_precision_update",
    "ProjectionInput",
    "ProjectionOutput",
    "constrained_project",
    "kld_objective",
    "GmmFactor",
    "gmm_belief_moments",
    "gmm_responsibilities",
    "gmm_min_precision",
    "GlmModel",
    "Mode",
    "Counters",
    "GlmState",
    "Posterior",
    "SweepReport",
    "init_state",
    "belief_fz_x_marginal",
    "belief_fz_z_marginal",
    "sweep",
    "run",
    "PriorGaussianization",
    "prior_gaussianization",
    "lmmse_estimate",
    "ep_clip_estimate",
    "SimConfig",
    "TrialResult",
    "RunSummary",
    "prior_factor",
    "noise_variance",
    "gen_instance",
    "nmse",
    "run_monte_carlo",
    "write_results",
    "GlmEpError",
    "NonIntegrable",
    "DegenerateVariance",
    "SingularMatrix",
    "NotPD",
    "ThresholdViolation",
    "InfeasibleThreshold",
    "NonIntegrableBelief",
    "ValidationError",
    "ZeroSignal",
]
