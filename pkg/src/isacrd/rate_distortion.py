"""Alternating-minimization solver for the estimator rate-distortion function.

For a fixed input distribution, R(D) is the smallest I(T; Z | X) over
estimator kernels P(z | x, t) meeting an average-distortion budget. Each
nonpositive slope ``mu`` selects one point of the curve through the penalized
objective

    F_mu(P, Q) = D(P(z|x,t) || Q(z|x) | P(x,t)) - mu * E[d(S, Z)],

which is minimized by alternating two closed-form updates: Q is replaced by
the conditional marginal induced by P, and P by a tilted version of Q whose
exponent is the posterior expected distortion scaled by mu. Both half-steps
decrease F_mu, and the iteration converges from any strictly positive start.
The solver asserts the descent property at every half-step and exposes the
recorded objective sequence for verification.

Sweeping a grid of slopes traces the curve; a bisection on the slope inverts
the map to hit a target distortion.
"""

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import rel_entr

from .estimator import minimum_distortion, zero_rate_distortion
from .model import (
    LN2,
    ConvergenceError,
    InfeasibleError,
    SdmcModel,
    ValidationError,
    as_pmf,
    joint_xt,
)

# Slack for cross-point monotonicity checks on converged sweeps. Boundary
# points converge sublinearly, so the residual error behind a 1e-9 stopping
# tolerance can reach a few 1e-7; violations beyond this indicate a bug.
_SWEEP_SLACK = 1e-6
_HULL_SLACK = 1e-6
_HALF_STEP_SLACK = 1e-12
# Floor for the iterated marginal: keeps its support strictly positive when
# steep slopes drive entries below the subnormal range. The induced objective
# perturbation is under 1e-290 nats.
_Q_FLOOR = 1e-300


@dataclass(frozen=True)
class BaConfig:
    """Solver configuration: slope mu <= 0, stopping tolerance, iteration cap.

    ``tol`` bounds the L1 change of the conditional marginal Q between
    consecutive iterations (summed over inputs and reconstructions).
    """

    mu: float
    tol: float = 1e-9
    max_iter: int = 100_000

    def __post_init__(self):
        if not (self.mu <= 0.0):
            raise ValidationError(f"slope mu must be <= 0, got {self.mu}")
        if not (self.tol > 0.0):
            raise ValidationError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class RdPoint:
    """One converged point of the rate-distortion sweep."""

    mu: float
    distortion: float
    rate_bits: float
    objective_nats: float
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class BaSolution:
    """Solver output: the summary point plus the final variables.

    ``objective_history`` holds F_mu after every half-step, starting with the
    first P-update; it is non-increasing within 1e-12.
    """

    point: RdPoint
    kernel: np.ndarray    # (X, T, Z) final P(z | x, t)
    marginal: np.ndarray  # (X, Z) final Q(z | x)
    objective_history: np.ndarray


@dataclass(frozen=True, eq=False)
class RdCurve:
    """Rate-distortion curve: points ordered by ascending distortion.

    Carries provenance (model content hash, input distribution, solver
    settings) so exported data can be traced back to its inputs.
    """

    points: tuple
    model_hash: str
    px: np.ndarray
    mu_grid: np.ndarray
    tol: float
    max_iter: int

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.points)

    def to_csv(self) -> str:
        lines = ["mu,D,R_bits,F_mu_nats,iterations,converged"]
        for p in self.points:
            lines.append(
                f"{p.mu:.12g},{p.distortion:.12g},{p.rate_bits:.12g},"
                f"{p.objective_nats:.12g},{p.iterations},{int(p.converged)}"
            )
        return "\n".join(lines) + "\n"

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_csv().encode()).hexdigest()


def default_mu_grid(n_negative: int = 40, steepest: float = -50.0,
                    shallowest: float = -0.01, include_zero: bool = True) -> np.ndarray:
    """Ascending slope grid: geometrically spaced negatives, optionally plus 0."""
    grid = -np.geomspace(-steepest, -shallowest, n_negative)
    if include_zero:
        grid = np.concatenate([grid, [0.0]])
    return grid


def p_update(q, model: SdmcModel, mu: float) -> np.ndarray:
    """Tilted kernel update: P(z|x,t) proportional to Q(z|x) exp(mu E[d(S,z)|x,t]).

    The exponent is stabilized by subtracting its row maximum before
    exponentiation. Cells with a probability-zero observation are excluded
    from the update and assigned a sentinel point mass on z = 0.
    """
    if mu > 0:
        raise ValidationError(f"slope mu must be <= 0, got {mu}")
    q = np.asarray(q, dtype=float)
    expo = mu * model.conditional_distortion
    gain = np.exp(expo - expo.max(axis=2, keepdims=True))
    return _tilt(q, gain, model.posterior.defined)


def _tilt(q, gain, defined):
    w = q[:, None, :] * gain
    norm = w.sum(axis=2, keepdims=True)
    assert np.all(norm[defined] > 0.0), "kernel update row degenerated to zero mass"
    p = np.divide(w, norm, out=np.zeros_like(w), where=norm > 0)
    p[~defined] = 0.0
    p[~defined, 0] = 1.0
    return p


def q_update(p, model: SdmcModel) -> np.ndarray:
    """Conditional marginal induced by a kernel: Q(z|x) = sum_t P(t|x) P(z|x,t)."""
    q = np.einsum("xt,xtz->xz", model.t_given_x, np.asarray(p, dtype=float))
    return q / q.sum(axis=1, keepdims=True)


def evaluate_objective(p, q, model: SdmcModel, px, mu: float) -> float:
    """Penalized objective F_mu(P, Q) in nats.

    With Q equal to the induced marginal of P this is I(T; Z | X) - mu E[d].
    Requires Q positive wherever P puts mass on weighted cells.
    """
    w = joint_xt(model, px)
    kl, dist = _objective_parts(np.asarray(p, dtype=float), np.asarray(q, dtype=float),
                                w, model.conditional_distortion)
    return kl - mu * dist


def _objective_parts(p, q, w, cond_dist):
    """Weighted divergence D(P||Q|w) and average distortion of ``p``, in nats."""
    cell_kl = rel_entr(p, q[:, None, :]).sum(axis=2)
    mask = w > 0
    kl = float(np.sum(w[mask] * cell_kl[mask]))
    dist = float(np.sum(w * np.einsum("xtz,xtz->xt", p, cond_dist)))
    return kl, dist


def _blind_kernel(model: SdmcModel) -> np.ndarray:
    """Point mass on the best observation-blind reconstruction, everywhere."""
    z_star = int(np.argmin(model.state_prior @ model.distortion))
    kernel = np.zeros((model.x_size, model.t_size, model.z_size))
    kernel[:, :, z_star] = 1.0
    return kernel


def solve_fixed_mu(model: SdmcModel, px, cfg: BaConfig) -> BaSolution:
    """Run the alternating minimization at one slope.

    Starts from the uniform marginal, alternates the kernel and marginal
    updates, and stops when the L1 change of the marginal falls below
    ``cfg.tol`` or the iteration cap is reached (reported via the converged
    flag; no exception). At mu = 0 the penalized objective is indifferent to
    distortion, so the curve-consistent minimizer is returned directly: the
    observation-blind kernel with zero rate at the zero-rate distortion.
    """
    px = as_pmf(px, model.x_size, "input distribution")
    w = joint_xt(model, px)
    cond_dist = model.conditional_distortion
    defined = model.posterior.defined
    d_floor = minimum_distortion(model, px)
    d_ceil = zero_rate_distortion(model)

    if cfg.mu == 0.0:
        kernel = _blind_kernel(model)
        q = q_update(kernel, model)
        kl, dist = _objective_parts(kernel, q, w, cond_dist)
        point = RdPoint(mu=0.0, distortion=dist, rate_bits=max(kl, 0.0) / LN2,
                        objective_nats=kl, iterations=0, converged=True)
        return BaSolution(point=point, kernel=kernel, marginal=q,
                          objective_history=np.array([kl]))

    # The tilt factor exp(mu * E[d | x, t, z]) is constant over the iteration.
    expo = cfg.mu * cond_dist
    gain = np.exp(expo - expo.max(axis=2, keepdims=True))
    t_given_x = model.t_given_x

    q = np.full((model.x_size, model.z_size), 1.0 / model.z_size)
    history = []
    f_prev = math.inf
    converged = False
    iterations = 0
    p = None
    kl = dist = 0.0
    for iterations in range(1, cfg.max_iter + 1):
        p = _tilt(q, gain, defined)
        kl_half, dist = _objective_parts(p, q, w, cond_dist)
        f_half = kl_half - cfg.mu * dist
        q_next = np.einsum("xt,xtz->xz", t_given_x, p)
        np.maximum(q_next, _Q_FLOOR, out=q_next)
        q_next /= q_next.sum(axis=1, keepdims=True)
        kl, _ = _objective_parts(p, q_next, w, cond_dist)
        f_full = kl - cfg.mu * dist
        assert f_half <= f_prev + _HALF_STEP_SLACK, "objective increased at kernel update"
        assert f_full <= f_half + _HALF_STEP_SLACK, "objective increased at marginal update"
        history.extend((f_half, f_full))
        f_prev = f_full
        delta = float(np.abs(q_next - q).sum())
        q = q_next
        if delta <= cfg.tol:
            converged = True
            break

    rate_bits = max(kl, 0.0) / LN2
    if converged:
        slack = max(1e-7, 1e3 * cfg.tol)
        assert d_floor - slack <= dist <= d_ceil + slack, (
            "converged distortion outside the feasible range"
        )
    point = RdPoint(mu=cfg.mu, distortion=dist, rate_bits=rate_bits,
                    objective_nats=f_prev, iterations=iterations, converged=converged)
    return BaSolution(point=point, kernel=p, marginal=q,
                      objective_history=np.asarray(history))


def _lower_hull(ds, rs):
    """Vertices of the lower convex hull of the (d, r) point sequence."""
    hull = []
    for d, r in zip(ds, rs):
        while len(hull) >= 2:
            (d0, r0), (d1, r1) = hull[-2], hull[-1]
            # pop the middle point if it lies on or above the chord
            if (r1 - r0) * (d - d0) >= (r - r0) * (d1 - d0):
                hull.pop()
            else:
                break
        hull.append((d, r))
    return hull


def _check_hull(points):
    ds = [p.distortion for p in points]
    rs = [p.rate_bits for p in points]
    hull = _lower_hull(ds, rs)
    hd = np.array([v[0] for v in hull])
    hr = np.array([v[1] for v in hull])
    hull_r = np.interp(ds, hd, hr)
    gap = np.asarray(rs) - hull_r
    assert np.all(gap <= _HULL_SLACK), "swept points deviate from their lower convex hull"


def trace_curve(model: SdmcModel, px, mu_grid=None, tol: float = 1e-9,
                max_iter: int = 100_000) -> RdCurve:
    """Sweep the slope grid and assemble the rate-distortion curve.

    The grid must be ascending and nonpositive. Points are sorted by
    distortion; points with coincident distortion (within 1e-9) are merged
    keeping the smaller rate. Monotonicity of distortion in the slope, of the
    rate along the curve, and convexity of the swept points are asserted on
    the converged subset.
    """
    px = as_pmf(px, model.x_size, "input distribution")
    grid = default_mu_grid() if mu_grid is None else np.asarray(mu_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("mu grid must be a nonempty one-dimensional array")
    if np.any(np.diff(grid) < 0):
        raise ValidationError("mu grid must be sorted ascending")
    if np.any(grid > 0):
        raise ValidationError("mu grid entries must be <= 0")

    solutions = [solve_fixed_mu(model, px, BaConfig(float(mu), tol, max_iter))
                 for mu in grid]
    swept = [s.point for s in solutions]

    conv = [p for p in swept if p.converged]
    for a, b in zip(conv, conv[1:]):
        assert b.distortion >= a.distortion - _SWEEP_SLACK, (
            "distortion not monotone in the slope"
        )

    ordered = sorted(swept, key=lambda p: (p.distortion, p.rate_bits))
    merged = []
    for p in ordered:
        if merged and p.distortion - merged[-1].distortion <= 1e-9:
            if p.rate_bits < merged[-1].rate_bits:
                merged[-1] = p
        else:
            merged.append(p)

    conv = [p for p in merged if p.converged]
    for a, b in zip(conv, conv[1:]):
        assert b.rate_bits <= a.rate_bits + _SWEEP_SLACK, "rate not monotone in distortion"
    if len(conv) >= 3:
        _check_hull(conv)

    return RdCurve(points=tuple(merged), model_hash=model.content_hash(), px=px,
                   mu_grid=grid, tol=tol, max_iter=max_iter)


def rate_at_distortion(model: SdmcModel, px, d_target: float, tol: float = 1e-8,
                       ba_tol: float = 1e-9, max_iter: int = 100_000) -> RdPoint:
    """Invert the slope-to-distortion map by bisection.

    Returns a converged point whose distortion is within ``tol`` of
    ``d_target``. Targets below the minimum achievable distortion raise
    :class:`InfeasibleError`; targets above the zero-rate distortion raise
    :class:`ValidationError` (the rate is identically zero there).
    """
    px = as_pmf(px, model.x_size, "input distribution")
    d_floor = minimum_distortion(model, px)
    d_ceil = zero_rate_distortion(model)
    if d_target < d_floor - 1e-12:
        raise InfeasibleError(
            f"target distortion {d_target} below the minimum achievable {d_floor}"
        )
    if d_target > d_ceil + 1e-12:
        raise ValidationError(
            f"target distortion {d_target} above the zero-rate distortion {d_ceil}"
        )

    def solve(mu):
        return solve_fixed_mu(model, px, BaConfig(mu, ba_tol, max_iter)).point

    # Upper bracket: a slope whose distortion is at or above the target.
    hi = 0.0
    hi_point = solve(hi)
    if abs(hi_point.distortion - d_target) <= tol:
        return hi_point

    # Lower bracket: grow the slope magnitude until distortion reaches the target.
    lo = -1.0
    lo_point = solve(lo)
    while lo_point.distortion > d_target + tol and lo > -1e7:
        if lo_point.distortion <= d_target:
            break
        hi, hi_point = lo, lo_point
        lo *= 4.0
        lo_point = solve(lo)
    if abs(lo_point.distortion - d_target) <= tol:
        return lo_point
    if lo_point.distortion > d_target:
        raise ConvergenceError(
            f"slope search stalled above the target distortion {d_target}",
            best=lo_point,
        )

    best = min((lo_point, hi_point), key=lambda p: abs(p.distortion - d_target))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        mid_point = solve(mid)
        if abs(mid_point.distortion - d_target) < abs(best.distortion - d_target):
            best = mid_point
        if abs(mid_point.distortion - d_target) <= tol:
            return mid_point
        if mid_point.distortion < d_target:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(
        f"slope bisection stalled; best distortion {best.distortion} for target {d_target}",
        best=best,
    )
