"""Capacity-rate-distortion tradeoff of the binary multiplicative channel.

Sweeps the outer-bound surface for state probabilities q = 0.5 and q = 0.3,
checks the numerical curves against the closed-form expressions, and writes
the boundary data (plus a quick plot when matplotlib is available) to
``demos/output/``.
"""

import pathlib

import numpy as np

import isacrd as ir

OUT = pathlib.Path(__file__).parent / "output"


def run(q):
    print(f"\n=== binary multiplicative channel, q = {q} ===")
    model = ir.build_binary_multiplicative_channel(q)
    m = min(q, 1 - q)
    print(f"zero-rate distortion: {ir.zero_rate_distortion(model):.4f}")

    # budgets from fully constrained sensing to unconstrained communication
    d0_grid = np.linspace(0.0, 0.5 * m, 6)
    surface = ir.sweep_region(model, d0_grid, mu_grid=ir.default_mu_grid(25))
    csv_path = OUT / f"binary_region_q{q:g}.csv"
    csv_path.write_text(ir.export_region(surface))
    print(f"wrote {csv_path} ({len(surface.points)} boundary points)")

    worst = 0.0
    for group in surface.groups:
        p0 = float(group.px_star[0])
        expect_c = ir.binary_mult_capacity(p0, q)
        print(f"  D0={group.d0:.4f}: C={group.c_bits:.4f} bits "
              f"(closed form {expect_c:.4f}), px*(0)={p0:.4f}, Dmin={group.d_min:.4f}")
        for point in group.points:
            worst = max(worst, abs(point.r_bits - ir.binary_mult_rate(p0, q, point.d)))
    print(f"largest gap to the closed-form rate curve: {worst:.2e} bits")
    return surface


def plot(surfaces):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping the plot")
        return
    fig, axes = plt.subplots(1, len(surfaces), figsize=(5 * len(surfaces), 4))
    for ax, (q, surface) in zip(np.atleast_1d(axes), surfaces):
        for group in surface.groups:
            ds = [p.d for p in group.points]
            rs = [p.r_bits for p in group.points]
            ax.plot(ds, rs, marker=".", label=f"D0={group.d0:.3f}, C={group.c_bits:.3f}")
        ax.set_xlabel("distortion D")
        ax.set_ylabel("estimation rate R(D) [bits]")
        ax.set_title(f"q = {q}")
        ax.legend(fontsize=7)
    fig.tight_layout()
    path = OUT / "binary_tradeoff.png"
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


def main():
    OUT.mkdir(exist_ok=True)
    surfaces = [(q, run(q)) for q in (0.5, 0.3)]
    plot(surfaces)


if __name__ == "__main__":
    main()
