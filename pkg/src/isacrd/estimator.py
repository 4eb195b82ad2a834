"""Minimum-distortion state estimation and Monte-Carlo validation.

The best deterministic estimator answers, for each (input, observation) pair,
the reconstruction with the smallest posterior expected distortion. Its
per-input average defines the sensing cost c(x), and the c-weighted input
average is the smallest distortion any estimator can reach under a given
input distribution. That value anchors the low-distortion end of the
rate-distortion sweep and the budget constraint of the capacity search.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import SdmcModel, ValidationError, as_pmf, joint_xt


@dataclass(frozen=True, eq=False)
class DeterministicEstimator:
    """Pointwise-optimal deterministic estimator of the channel state.

    ``decision[x, t]`` is the reconstruction index chosen at (x, t), with ties
    broken toward the smallest index. ``pointwise_distortion[x, t]`` is the
    posterior expected distortion of that choice, and ``sensing_cost[x]`` its
    observation average given the input. Cells whose observation has zero
    probability are flagged in ``defined`` and assigned the sentinel decision
    z = 0; they never carry probability weight.
    """

    decision: np.ndarray              # (X, T) int
    pointwise_distortion: np.ndarray  # (X, T)
    sensing_cost: np.ndarray          # (X,)
    defined: np.ndarray               # (X, T) bool
    z_size: int

    def to_kernel(self) -> np.ndarray:
        """One-hot estimator kernel P(z | x, t) implementing the decision map."""
        x_size, t_size = self.decision.shape
        kernel = np.zeros((x_size, t_size, self.z_size))
        xs, ts = np.indices(self.decision.shape)
        kernel[xs, ts, self.decision] = 1.0
        return kernel


class EmpiricalDistortion(NamedTuple):
    mean: float
    stderr: float


def build_deterministic_estimator(model: SdmcModel) -> DeterministicEstimator:
    """Construct the minimum-distortion deterministic estimator of ``model``."""
    cond = model.conditional_distortion
    decision = cond.argmin(axis=2)
    pointwise = cond.min(axis=2)
    cost = np.einsum("xt,xt->x", model.t_given_x, pointwise)
    defined = model.posterior.defined.copy()
    for arr in (decision, pointwise, cost, defined):
        arr.flags.writeable = False
    return DeterministicEstimator(
        decision=decision,
        pointwise_distortion=pointwise,
        sensing_cost=cost,
        defined=defined,
        z_size=model.z_size,
    )


def minimum_distortion(model: SdmcModel, px) -> float:
    """Smallest achievable E[d(S, Z)] under ``px``; equals sum_x P(x) c(x).

    The cell sum is correctly rounded (fsum), so exhaustive search over
    deterministic decision maps reproduces this value bit for bit.
    """
    w = joint_xt(model, px)
    est = build_deterministic_estimator(model)
    return math.fsum(np.ravel(w * est.pointwise_distortion))


def zero_rate_distortion(model: SdmcModel) -> float:
    """Distortion of the best observation-blind guess; R(D) = 0 beyond it."""
    return float(np.min(model.state_prior @ model.distortion))


def simulate_empirical_distortion(model: SdmcModel, px, kernel, n: int,
                                  seed: int) -> EmpiricalDistortion:
    """Monte-Carlo estimate of the average distortion of an estimator kernel.

    Draws ``n`` i.i.d. (x, s, t, z) tuples from the product law
    P(x) P(s) P(t | x, s) P(z | x, t) and returns the sample mean of d(s, z)
    with its standard error. Sampling uses numpy's PCG64 generator seeded with
    ``seed``; output is deterministic for a fixed seed within one environment.
    """
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    px = as_pmf(px, model.x_size, "input distribution")
    kernel = np.asarray(kernel, dtype=float)
    law = np.einsum("x,s,xst,xtz->xstz", px, model.state_prior,
                    model.sensing_kernel, kernel)
    flat = law.reshape(-1)
    flat = flat / flat.sum()
    d_flat = np.broadcast_to(
        model.distortion[None, :, None, :], law.shape
    ).reshape(-1)
    rng = np.random.default_rng(seed)
    idx = rng.choice(flat.size, size=int(n), p=flat)
    samples = d_flat[idx]
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EmpiricalDistortion(mean=mean, stderr=stderr)
