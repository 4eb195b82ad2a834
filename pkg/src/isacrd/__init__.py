"""Capacity-rate-distortion toolbox for state-dependent memoryless channels.

Models integrated sensing and communication links in which one input both
carries data and probes an i.i.d. channel state through an echo observation.
The package computes the estimation rate-distortion function by alternating
minimization, the cost-constrained channel capacity, the combined
capacity-rate-distortion surface, and closed-form reference curves for the
standard example channels.
"""

from .analytic import (
    GaussianSensingParams,
    PamConstellation,
    binary_entropy,
    binary_mult_capacity,
    binary_mult_rate,
    build_binary_multiplicative_channel,
    build_product_dmc,
    gaussian_det_rd,
    gaussian_mixture_rd,
    pam_constellation,
)
from .capacity import (
    CapacityPoint,
    blahut_capacity_cost,
    capacity_distortion_curve,
    capacity_points_to_csv,
    conditional_mi_xy_given_s,
    px_star_table,
)
from .estimator import (
    DeterministicEstimator,
    EmpiricalDistortion,
    build_deterministic_estimator,
    minimum_distortion,
    simulate_empirical_distortion,
    zero_rate_distortion,
)
from .model import (
    ConvergenceError,
    InfeasibleError,
    PosteriorS,
    SdmcModel,
    ValidationError,
    as_pmf,
    channel_spec_text,
    conditional_mutual_information,
    expected_distortion,
    joint_xt,
    load_channel_spec,
    posterior_s_given_xt,
)
from .rate_distortion import (
    BaConfig,
    BaSolution,
    RdCurve,
    RdPoint,
    default_mu_grid,
    evaluate_objective,
    p_update,
    q_update,
    rate_at_distortion,
    solve_fixed_mu,
    trace_curve,
)
from .region import (
    RegionGroup,
    RegionPoint,
    RegionSurface,
    export_region,
    sweep_region,
)

__version__ = "0.1.0"

__all__ = [
    "BaConfig",
    "BaSolution",
    "CapacityPoint",
    "ConvergenceError",
    "DeterministicEstimator",
    "EmpiricalDistortion",
    "GaussianSensingParams",
    "InfeasibleError",
    "PamConstellation",
    "PosteriorS",
    "RdCurve",
    "RdPoint",
    "RegionGroup",
    "RegionPoint",
    "RegionSurface",
    "SdmcModel",
    "ValidationError",
    "as_pmf",
    "binary_entropy",
    "binary_mult_capacity",
    "binary_mult_rate",
    "blahut_capacity_cost",
    "build_binary_multiplicative_channel",
    "build_deterministic_estimator",
    "build_product_dmc",
    "capacity_distortion_curve",
    "capacity_points_to_csv",
    "channel_spec_text",
    "conditional_mi_xy_given_s",
    "conditional_mutual_information",
    "default_mu_grid",
    "evaluate_objective",
    "expected_distortion",
    "export_region",
    "gaussian_det_rd",
    "gaussian_mixture_rd",
    "joint_xt",
    "load_channel_spec",
    "minimum_distortion",
    "p_update",
    "pam_constellation",
    "posterior_s_given_xt",
    "px_star_table",
    "q_update",
    "rate_at_distortion",
    "simulate_empirical_distortion",
    "solve_fixed_mu",
    "sweep_region",
    "trace_curve",
    "zero_rate_distortion",
]
