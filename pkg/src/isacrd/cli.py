"""Command-line interface.

Subcommands mirror the library: ``rd-curve`` sweeps the estimation
rate-distortion curve, ``capacity`` the constrained channel capacity,
``region`` the capacity-rate-distortion surface, ``gaussian`` the closed-form
waveform comparison, and ``validate`` checks a channel document and prints a
model summary. Results are written as CSV with a fixed column contract
(12 significant digits); summaries go to standard output. Runs are
deterministic: the same configuration and seed produce byte-identical files.

Exit codes: 0 success, 2 invalid input, 3 infeasible constraints,
4 non-convergence (CSV still written with per-row flags).
"""

import argparse
import math
import statistics
import sys

import numpy as np

from .analytic import (
    GaussianSensingParams,
    build_binary_multiplicative_channel,
    build_product_dmc,
    gaussian_det_rd,
    gaussian_mixture_rd,
    pam_constellation,
)
from .capacity import (
    blahut_capacity_cost,
    capacity_distortion_curve,
    capacity_points_to_csv,
    px_star_table,
)
from .estimator import minimum_distortion, simulate_empirical_distortion, zero_rate_distortion
from .model import (
    LN2,
    ConvergenceError,
    InfeasibleError,
    ValidationError,
    load_channel_spec,
)
from .rate_distortion import default_mu_grid, trace_curve
from .region import export_region, sweep_region

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_NONCONVERGED = 4


def _parse_floats(text, what):
    try:
        return np.array([float(tok) for tok in text.split(",")])
    except ValueError:
        raise ValidationError(f"{what} must be a comma-separated list of numbers, got {text!r}")


def _parse_grid(text, what, geometric=False):
    """Parse ``lo:hi:n`` (optionally ``n-geom`` / ``n-lin``) into a grid array."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"{what} must look like lo:hi:n, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        ntok = parts[2]
        if ntok.endswith("-geom"):
            geometric, ntok = True, ntok[:-5]
        elif ntok.endswith("-lin"):
            geometric, ntok = False, ntok[:-4]
        n = int(ntok)
    except ValueError:
        raise ValidationError(f"{what} must look like lo:hi:n, got {text!r}")
    if n < 1:
        raise ValidationError(f"{what} needs at least one point")
    if not geometric:
        return np.linspace(lo, hi, n)
    if lo == 0.0 or hi == 0.0 or (lo < 0) != (hi < 0):
        raise ValidationError(f"{what}: geometric spacing needs nonzero endpoints of one sign")
    sign = -1.0 if lo < 0 else 1.0
    return sign * np.geomspace(abs(lo), abs(hi), n)


def _load_model(args):
    if args.spec is not None:
        try:
            with open(args.spec, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read channel document: {exc}")
        return load_channel_spec(text)
    if args.builtin == "binary-mult":
        return build_binary_multiplicative_channel(args.q)
    if args.builtin == "product-dmc":
        prior = _parse_floats(args.state_prior, "--state-prior")
        return build_product_dmc(prior)
    raise ValidationError("one of --spec or --builtin is required")


def _parse_px(text, model):
    if text == "uniform":
        return np.full(model.x_size, 1.0 / model.x_size)
    return _parse_floats(text, "--px")


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _add_channel_options(sub):
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", help="path to a JSON channel document")
    src.add_argument("--builtin", choices=["binary-mult", "product-dmc"],
                     help="built-in example channel")
    sub.add_argument("--q", type=float, default=0.5,
                     help="state probability for binary-mult (default 0.5)")
    sub.add_argument("--state-prior", default="0.25,0.25,0.25,0.25",
                     help="comma list for product-dmc (default uniform)")


def _rate_label(args):
    return "bits" if args.unit == "bits" else "nats"


def _rate_value(bits, args):
    return bits if args.unit == "bits" else bits * LN2


def cmd_rd_curve(args) -> int:
    model = _load_model(args)
    px = _parse_px(args.px, model)
    if args.mu is not None:
        grid = np.array([args.mu])
    elif args.mu_grid is not None:
        grid = np.sort(_parse_grid(args.mu_grid, "--mu-grid", geometric=True))
    else:
        grid = default_mu_grid()
    curve = trace_curve(model, px, grid, tol=args.tol, max_iter=args.max_iter)
    _write(args.out, curve.to_csv())
    pts = curve.points
    iters = [p.iterations for p in pts]
    n_conv = sum(p.converged for p in pts)
    unit = _rate_label(args)
    print(f"points={len(pts)} converged={n_conv}/{len(pts)}")
    print(f"D range: [{pts[0].distortion:.6g}, {pts[-1].distortion:.6g}]")
    print(f"R range: [{_rate_value(pts[-1].rate_bits, args):.6g}, "
          f"{_rate_value(pts[0].rate_bits, args):.6g}] {unit}")
    print(f"iterations: min={min(iters)} median={int(statistics.median(iters))} "
          f"max={max(iters)}")
    return EXIT_OK if curve.all_converged else EXIT_NONCONVERGED


def cmd_capacity(args) -> int:
    model = _load_model(args)
    if args.d0 is not None:
        grid = np.array([args.d0])
    elif args.d0_grid is not None:
        grid = _parse_grid(args.d0_grid, "--d0-grid")
    else:
        raise ValidationError("one of --d0 or --d0-grid is required")
    points = capacity_distortion_curve(model, grid, b=args.b, tol=args.tol,
                                       max_iter=args.max_iter)
    _write(args.out, capacity_points_to_csv(points))
    if args.px_out is not None:
        _write(args.px_out, px_star_table(points))
    unit = _rate_label(args)
    for p in points:
        print(f"D0={p.d0:.6g} C={_rate_value(p.capacity_bits, args):.6g} {unit} "
              f"sensing_cost={p.sensing_cost_attained:.6g} "
              f"input_cost={p.input_cost_attained:.6g} converged={int(p.converged)}")
    return EXIT_OK if all(p.converged for p in points) else EXIT_NONCONVERGED


def cmd_region(args) -> int:
    model = _load_model(args)
    d0_grid = _parse_grid(args.d0_grid, "--d0-grid")
    mu_grid = (np.sort(_parse_grid(args.mu_grid, "--mu-grid", geometric=True))
               if args.mu_grid is not None else None)
    surface = sweep_region(model, d0_grid, b=args.b, mu_grid=mu_grid,
                           ba_tol=args.tol, ba_max_iter=args.max_iter)
    if not surface.groups:
        raise InfeasibleError("no budget in the grid is feasible")
    _write(args.out, export_region(surface))
    if args.px_out is not None:
        _write(args.px_out, px_star_table([g.capacity for g in surface.groups]))
    unit = _rate_label(args)
    for group in surface.groups:
        print(f"D0={group.d0:.6g} C={_rate_value(group.c_bits, args):.6g} {unit} "
              f"Dmin={group.d_min:.6g} curve_points={len(group.curve.points)}")
    for d0, reason in surface.skipped:
        print(f"skipped D0={d0:.6g}: {reason}")
    return EXIT_OK if surface.all_converged else EXIT_NONCONVERGED


def cmd_gaussian(args) -> int:
    params = GaussianSensingParams(sigma_s2=args.sigma_s2, sigma_n2=args.sigma_n2,
                                   power=10.0 ** (args.power_db / 10.0))
    amp = math.sqrt(params.power)
    pam = pam_constellation(args.pam_order, params.power)
    v_det = params.power * params.sigma_s2
    det_low = v_det * params.sigma_n2 / (v_det + params.sigma_n2)
    v_max = float(np.max(pam.amplitudes ** 2)) * params.sigma_s2
    pam_low = v_max * params.sigma_n2 / (v_max + params.sigma_n2)

    if args.d_grid is not None:
        grid = _parse_grid(args.d_grid, "--d-grid")
    else:
        if args.compare:
            lo = max(det_low, pam_low) * 1.001
            hi = max(v_det, v_max) * 1.05
        elif args.waveform == "det":
            lo, hi = det_low * 1.001, v_det * 1.05
        else:
            lo, hi = pam_low * 1.001, v_max * 1.05
        grid = np.linspace(lo, hi, 100)

    lines = []
    if args.compare:
        lines.append("D,R_det_bits,R_pam_bits")
        for d in grid:
            det = gaussian_det_rd(amp, params, float(d))
            mix = gaussian_mixture_rd(pam, params, float(d))
            lines.append(f"{d:.12g},{det:.12g},{mix:.12g}")
    else:
        lines.append("D,R_bits")
        for d in grid:
            if args.waveform == "det":
                val = gaussian_det_rd(amp, params, float(d))
            else:
                val = gaussian_mixture_rd(pam, params, float(d))
            lines.append(f"{d:.12g},{val:.12g}")
    _write(args.out, "\n".join(lines) + "\n")
    print(f"power={params.power:.6g} ({args.power_db:g} dB) grid_points={len(grid)}")
    print(f"deterministic amplitude={amp:.6g}, PAM order={args.pam_order} "
          f"spacing={pam.spacing:.6g}")
    return EXIT_OK


def cmd_validate(args) -> int:
    model = _load_model(args)
    uniform = np.full(model.x_size, 1.0 / model.x_size)
    print(f"alphabets: |X|={model.x_size} |S|={model.s_size} |T|={model.t_size} "
          f"|Y|={model.y_size} |Z|={model.z_size}")
    print(f"d_max: {model.d_max:.6g}")
    print(f"zero-rate distortion: {zero_rate_distortion(model):.6g}")
    print(f"minimum distortion (uniform input): {minimum_distortion(model, uniform):.6g}")
    if args.mc is not None:
        from .estimator import build_deterministic_estimator

        kernel = build_deterministic_estimator(model).to_kernel()
        result = simulate_empirical_distortion(model, uniform, kernel, args.mc, args.seed)
        print(f"empirical minimum distortion ({args.mc} samples, seed {args.seed}): "
              f"{result.mean:.6g} +/- {result.stderr:.3g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isacrd",
        description="Capacity-rate-distortion computations for state-dependent "
                    "memoryless channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rd = sub.add_parser("rd-curve", help="sweep the estimation rate-distortion curve")
    _add_channel_options(rd)
    rd.add_argument("--px", default="uniform", help="input distribution (comma list or 'uniform')")
    rd.add_argument("--mu", type=float, help="single slope value <= 0")
    rd.add_argument("--mu-grid", help="slope grid lo:hi:n (geometric), endpoints < 0")
    rd.add_argument("--tol", type=float, default=1e-9, help="solver stopping tolerance")
    rd.add_argument("--max-iter", type=int, default=100_000)
    rd.add_argument("--unit", choices=["bits", "nats"], default="bits",
                    help="unit for printed summaries (CSV columns are always bits)")
    rd.add_argument("--out", required=True, help="output CSV path")
    rd.set_defaults(func=cmd_rd_curve)

    cap = sub.add_parser("capacity", help="constrained channel capacity")
    _add_channel_options(cap)
    cap.add_argument("--d0", type=float, help="single sensing-cost budget")
    cap.add_argument("--d0-grid", help="budget grid lo:hi:n (linear)")
    cap.add_argument("--b", type=float, default=math.inf, help="input-cost budget (default inf)")
    cap.add_argument("--tol", type=float, default=1e-11)
    cap.add_argument("--max-iter", type=int, default=20_000)
    cap.add_argument("--unit", choices=["bits", "nats"], default="bits")
    cap.add_argument("--out", required=True, help="output CSV path")
    cap.add_argument("--px-out", help="optional JSON path for the maximizing inputs")
    cap.set_defaults(func=cmd_capacity)

    reg = sub.add_parser("region", help="capacity-rate-distortion surface sweep")
    _add_channel_options(reg)
    reg.add_argument("--d0-grid", required=True, help="budget grid lo:hi:n (linear)")
    reg.add_argument("--b", type=float, default=math.inf)
    reg.add_argument("--mu-grid", help="slope grid lo:hi:n (geometric), endpoints < 0")
    reg.add_argument("--tol", type=float, default=1e-9)
    reg.add_argument("--max-iter", type=int, default=100_000)
    reg.add_argument("--unit", choices=["bits", "nats"], default="bits")
    reg.add_argument("--out", required=True, help="output CSV path")
    reg.add_argument("--px-out", help="optional JSON path for the maximizing inputs")
    reg.set_defaults(func=cmd_region)

    gau = sub.add_parser("gaussian", help="closed-form Gaussian waveform curves")
    gau.add_argument("--waveform", choices=["det", "pam"], default="det")
    gau.add_argument("--compare", action="store_true",
                     help="emit both waveform curves in one CSV")
    gau.add_argument("--power-db", type=float, default=10.0)
    gau.add_argument("--pam-order", type=int, default=16)
    gau.add_argument("--sigma-s2", type=float, default=1.0)
    gau.add_argument("--sigma-n2", type=float, default=1.0)
    gau.add_argument("--d-grid", help="distortion grid lo:hi:n (linear)")
    gau.add_argument("--out", required=True, help="output CSV path")
    gau.set_defaults(func=cmd_gaussian)

    val = sub.add_parser("validate", help="validate a channel and print a summary")
    _add_channel_options(val)
    val.add_argument("--mc", type=int,
                     help="also run a Monte-Carlo distortion check with this many samples")
    val.add_argument("--seed", type=int, default=0, help="sampling seed for --mc")
    val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
