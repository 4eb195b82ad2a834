"""Outer-bound surface of the capacity-rate-distortion region.

For each sensing-cost budget the capacity search yields the best achievable
communication rate together with its maximizing input distribution; the full
estimation rate-distortion curve is then traced under that same input law.
The surface collects the resulting (C, R, D) triples grouped by budget. The
bounds are one-directional (capacity from above, estimation rate from below),
so the output is an outer bound on the achievable region, not an exact
characterization.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .capacity import CapacityPoint, blahut_capacity_cost
from .estimator import build_deterministic_estimator, minimum_distortion, zero_rate_distortion
from .model import InfeasibleError, SdmcModel
from .rate_distortion import RdCurve, trace_curve


@dataclass(frozen=True, eq=False)
class RegionPoint:
    """One (C, R, D) triple of the outer-bound surface."""

    d0: float
    b: float
    c_bits: float
    px_star: np.ndarray
    d_min: float
    d: float
    r_bits: float
    converged: bool


@dataclass(frozen=True, eq=False)
class RegionGroup:
    """All sweep points sharing one budget and its maximizing input law."""

    d0: float
    b: float
    c_bits: float
    px_star: np.ndarray
    d_min: float
    capacity: CapacityPoint
    curve: RdCurve

    @property
    def points(self) -> tuple:
        shared_converged = self.capacity.converged
        return tuple(
            RegionPoint(d0=self.d0, b=self.b, c_bits=self.c_bits,
                        px_star=self.px_star, d_min=self.d_min,
                        d=p.distortion, r_bits=p.rate_bits,
                        converged=bool(p.converged and shared_converged))
            for p in self.curve.points
        )


@dataclass(frozen=True, eq=False)
class RegionSurface:
    """Budget-grouped boundary points plus skipped-budget diagnostics."""

    groups: tuple
    skipped: tuple  # (d0, reason) pairs
    model_hash: str
    b: float
    mu_grid: np.ndarray

    @property
    def points(self) -> tuple:
        out = []
        for group in self.groups:
            out.extend(group.points)
        return tuple(out)

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.points)


def sweep_region(model: SdmcModel, d0_grid, b: float = math.inf, mu_grid=None,
                 ba_tol: float = 1e-9, ba_max_iter: int = 100_000,
                 cap_tol: float = 1e-11, cap_max_iter: int = 20_000) -> RegionSurface:
    """Assemble the outer-bound surface over a grid of sensing-cost budgets.

    Budgets outside [min_x c(x), zero-rate distortion] are reported in the
    surface's ``skipped`` list (with a warning) rather than failing the sweep.
    """
    grid = np.asarray(d0_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("budget grid must be a nonempty one-dimensional array")
    est = build_deterministic_estimator(model)
    floor = float(est.sensing_cost.min())
    ceil = zero_rate_distortion(model)

    groups = []
    skipped = []
    for d0 in grid:
        d0 = float(d0)
        if d0 < floor - 1e-9:
            reason = f"budget {d0} below the attainable minimum sensing cost {floor}"
        elif d0 > ceil + 1e-9:
            reason = f"budget {d0} above the zero-rate distortion {ceil}"
        else:
            reason = None
        if reason is not None:
            warnings.warn(reason, stacklevel=2)
            skipped.append((d0, reason))
            continue
        try:
            cap = blahut_capacity_cost(model, d0, b, cap_tol, cap_max_iter)
        except InfeasibleError as exc:
            warnings.warn(str(exc), stacklevel=2)
            skipped.append((d0, str(exc)))
            continue
        d_min = minimum_distortion(model, cap.px_star)
        curve = trace_curve(model, cap.px_star, mu_grid, tol=ba_tol,
                            max_iter=ba_max_iter)
        groups.append(RegionGroup(d0=d0, b=float(b), c_bits=cap.capacity_bits,
                                  px_star=cap.px_star, d_min=d_min,
                                  capacity=cap, curve=curve))

    mu_used = groups[0].curve.mu_grid if groups else np.asarray(
        [] if mu_grid is None else mu_grid, dtype=float)
    return RegionSurface(groups=tuple(groups), skipped=tuple(skipped),
                         model_hash=model.content_hash(), b=float(b),
                         mu_grid=mu_used)


def export_region(surface: RegionSurface) -> str:
    """CSV rows sorted by (budget, distortion), 12 significant digits."""
    if not surface.groups:
        raise ValueError("cannot export an empty surface")
    lines = ["D0,B,C_bits,Dmin,D,R_bits,converged"]
    for group in sorted(surface.groups, key=lambda g: g.d0):
        for p in group.points:
            lines.append(
                f"{p.d0:.12g},{p.b:.12g},{p.c_bits:.12g},{p.d_min:.12g},"
                f"{p.d:.12g},{p.r_bits:.12g},{int(p.converged)}"
            )
    return "\n".join(lines) + "\n"
