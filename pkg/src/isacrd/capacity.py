"""Constrained channel capacity of the communication branch.

The communication side maximizes I(X; Y | S) over input distributions whose
average sensing cost E[c(X)] stays within a budget, optionally together with
an average input-cost budget E[b(X)] <= B. The sensing cost c(x) is the
expected minimal posterior distortion when x is transmitted, supplied by the
deterministic-estimator construction.

Both constraints are linear in the input distribution, so the search runs a
standard multiplicative capacity iteration at fixed Lagrange multipliers and
bisects each multiplier on its budget; the dual cost is monotone in its own
multiplier. When the iteration jumps across a budget (flat directions of the
objective), the two bracketing solutions are mixed to land exactly on the
budget line, which is optimal by concavity.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp, rel_entr

from .estimator import build_deterministic_estimator
from .model import LN2, InfeasibleError, SdmcModel, as_pmf

_BUDGET_SLACK = 1e-9
_TIGHT = 1e-11
_LAMBDA_CAP = 1e8


@dataclass(frozen=True, eq=False)
class CapacityPoint:
    """Constrained capacity at one budget pair, with the maximizing input law."""

    d0: float
    b: float
    capacity_bits: float
    px_star: np.ndarray
    sensing_cost_attained: float
    input_cost_attained: float
    converged: bool


def conditional_mi_xy_given_s(model: SdmcModel, px, unit: str = "bits") -> float:
    """I(X; Y | S): state-averaged mutual information of the communication branch."""
    px = as_pmf(px, model.x_size, "input distribution")
    per_input = _per_input_divergence(px, model.comm_kernel, model.state_prior)
    active = px > 0
    value = max(float(np.sum(px[active] * per_input[active])), 0.0)
    if unit == "nats":
        return value
    if unit != "bits":
        raise ValueError(f"unknown unit {unit!r}")
    return value / LN2


def _per_input_divergence(p, comm, state_prior):
    """D_x = sum_s P(s) KL(P(y|x,s) || P(y|s)) in nats; +inf off the support of p."""
    marg = np.einsum("x,xsy->sy", p, comm)
    cell = rel_entr(comm, marg[None, :, :]).sum(axis=2)
    return cell @ state_prior


@dataclass(frozen=True, eq=False)
class _Run:
    p: np.ndarray
    rate_nats: float
    cost_c: float
    cost_b: float
    converged: bool


def _record(model, p, cvec, bvec, converged) -> _Run:
    active = p > 0
    per_input = _per_input_divergence(p, model.comm_kernel, model.state_prior)
    rate = max(float(np.sum(p[active] * per_input[active])), 0.0)
    return _Run(p=p, rate_nats=rate, cost_c=float(p @ cvec),
                cost_b=float(p @ bvec), converged=converged)


def _ba_fixed_multipliers(model, cvec, bvec, lam_c, lam_b, tol, max_iter,
                          support=None) -> _Run:
    """Multiplicative capacity iteration for the penalized objective.

    Maximizes I(X; Y | S) - lam_c E[c] - lam_b E[b]; stops when the duality
    gap max_x r_x - sum_x p(x) r_x drops below ``tol`` (nats). Coordinates
    that underflow to zero stay zero, which is the correct restriction.
    """
    x_size = model.x_size
    p = np.zeros(x_size)
    if support is None:
        p[:] = 1.0 / x_size
    else:
        p[support] = 1.0 / len(support)
    penalty = lam_c * cvec + lam_b * bvec
    comm, prior = model.comm_kernel, model.state_prior
    converged = False
    for _ in range(max_iter):
        active = p > 0
        r = _per_input_divergence(p, comm, prior) - penalty
        mean_r = float(np.sum(p[active] * r[active]))
        gap = float(np.max(r[active])) - mean_r
        if gap <= tol:
            converged = True
            break
        logits = np.full(x_size, -np.inf)
        logits[active] = np.log(p[active]) + r[active]
        p = np.exp(logits - logsumexp(logits))
    return _record(model, p, cvec, bvec, converged)


def _min_sensing_cost(cvec, bvec, b) -> float:
    """Smallest attainable E[c] subject to E[b] <= b; infeasible budgets raise."""
    if math.isinf(b):
        return float(cvec.min())
    n = cvec.shape[0]
    res = linprog(c=cvec, A_ub=bvec[None, :], b_ub=[b],
                  A_eq=np.ones((1, n)), b_eq=[1.0], bounds=(0.0, 1.0),
                  method="highs")
    if not res.success:
        raise InfeasibleError(f"no input distribution meets the input-cost budget {b}")
    return float(res.fun)


def blahut_capacity_cost(model: SdmcModel, d0: float, b: float = math.inf,
                         tol: float = 1e-11, max_iter: int = 20_000) -> CapacityPoint:
    """Constrained capacity max I(X; Y | S) over E[c(X)] <= d0, E[b(X)] <= b.

    Bisects the sensing-cost multiplier (and the input-cost multiplier when
    the budget is finite, in alternating rounds) around the inner capacity
    iteration. Raises :class:`InfeasibleError` when no input distribution
    meets the budgets; reports non-convergence through the flag.
    """
    est = build_deterministic_estimator(model)
    cvec = est.sensing_cost
    bvec = model.input_cost
    floor = _min_sensing_cost(cvec, bvec, b)
    if floor > d0 + _BUDGET_SLACK:
        raise InfeasibleError(
            f"sensing-cost budget {d0} below the attainable minimum {floor}"
        )

    def run(lam_c, lam_b, support=None):
        return _ba_fixed_multipliers(model, cvec, bvec, lam_c, lam_b, tol,
                                     max_iter, support=support)

    def fit(evaluate, budget, cost_of, fallback, hint=None):
        """Bisect one multiplier until its budget binds from the feasible side."""
        sol = evaluate(0.0)
        if cost_of(sol) <= budget + _BUDGET_SLACK:
            return 0.0, sol
        lo, sol_lo = 0.0, sol
        hi = hint if (hint is not None and hint > 0) else 1.0
        sol_hi = evaluate(hi)
        while cost_of(sol_hi) > budget and hi < _LAMBDA_CAP:
            lo, sol_lo = hi, sol_hi
            hi *= 4.0
            sol_hi = evaluate(hi)
        if cost_of(sol_hi) > budget:
            return hi, fallback()
        for _ in range(120):
            if cost_of(sol_hi) >= budget - _TIGHT:
                break
            if hi - lo <= 1e-12 * max(1.0, hi):
                break
            mid = 0.5 * (lo + hi)
            sol_mid = evaluate(mid)
            if cost_of(sol_mid) <= budget:
                hi, sol_hi = mid, sol_mid
            else:
                lo, sol_lo = mid, sol_mid
        if cost_of(sol_hi) < budget - _TIGHT and cost_of(sol_lo) > cost_of(sol_hi):
            # flat direction: mix the bracket solutions to sit on the budget
            alpha = (budget - cost_of(sol_hi)) / (cost_of(sol_lo) - cost_of(sol_hi))
            alpha = min(max(alpha, 0.0), 1.0)
            mix = _record(model, alpha * sol_lo.p + (1.0 - alpha) * sol_hi.p, cvec,
                          bvec, sol_lo.converged and sol_hi.converged)
            if cost_of(mix) <= budget + _BUDGET_SLACK and mix.rate_nats >= sol_hi.rate_nats:
                sol_hi = mix
        return hi, sol_hi

    def min_cost_face(costs, support):
        if support is None:
            return np.flatnonzero(costs <= costs.min() + 1e-12)
        sub = costs[support]
        return support[np.flatnonzero(sub <= sub.min() + 1e-12)]

    lam_c_hint = None

    def fit_sensing(lam_b, support=None):
        """Pin the sensing budget at a fixed input-cost multiplier."""
        nonlocal lam_c_hint
        lam_c, sol = fit(
            lambda l: run(l, lam_b, support),
            d0,
            lambda s: s.cost_c,
            lambda: run(0.0, lam_b, support=min_cost_face(cvec, support)),
            hint=lam_c_hint,
        )
        lam_c_hint = lam_c if lam_c > 0 else lam_c_hint
        return sol

    sol = fit_sensing(0.0)
    if not math.isinf(b) and sol.cost_b > b + _BUDGET_SLACK:
        # outer bisection on the input-cost multiplier; every evaluation
        # re-pins the sensing budget, so the bracket stays sensing-feasible
        _, sol = fit(
            fit_sensing,
            b,
            lambda s: s.cost_b,
            lambda: fit_sensing(0.0, support=min_cost_face(bvec, None)),
        )

    feasible = sol.cost_c <= d0 + _BUDGET_SLACK and (math.isinf(b)
                                                     or sol.cost_b <= b + _BUDGET_SLACK)
    px_star = sol.p.copy()
    px_star.flags.writeable = False
    return CapacityPoint(
        d0=float(d0), b=float(b),
        capacity_bits=conditional_mi_xy_given_s(model, px_star),
        px_star=px_star,
        sensing_cost_attained=sol.cost_c,
        input_cost_attained=sol.cost_b,
        converged=bool(sol.converged and feasible),
    )


def capacity_distortion_curve(model: SdmcModel, d0_grid, b: float = math.inf,
                              tol: float = 1e-11, max_iter: int = 20_000):
    """Constrained capacity along an ascending grid of sensing-cost budgets."""
    grid = np.asarray(d0_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("budget grid must be a nonempty one-dimensional array")
    if np.any(np.diff(grid) < 0):
        raise ValueError("budget grid must be sorted ascending")
    points = [blahut_capacity_cost(model, float(d0), b, tol, max_iter) for d0 in grid]
    for a, b_ in zip(points, points[1:]):
        assert b_.capacity_bits >= a.capacity_bits - 1e-7, (
            "capacity decreased along a relaxing budget grid"
        )
    return points


def capacity_points_to_csv(points) -> str:
    lines = ["D0,B,C_bits,sensing_cost,input_cost,converged"]
    for p in points:
        lines.append(
            f"{p.d0:.12g},{p.b:.12g},{p.capacity_bits:.12g},"
            f"{p.sensing_cost_attained:.12g},{p.input_cost_attained:.12g},"
            f"{int(p.converged)}"
        )
    return "\n".join(lines) + "\n"


def px_star_table(points) -> str:
    """Companion JSON serialization of the maximizing input distributions."""
    records = []
    for p in points:
        records.append({
            "d0": p.d0,
            "b": "inf" if math.isinf(p.b) else p.b,
            "px_star": [float(v) for v in p.px_star],
        })
    return json.dumps(records, indent=2) + "\n"
