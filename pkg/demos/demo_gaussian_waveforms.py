"""Deterministic versus 16-PAM waveforms on the Gaussian echo-sensing channel.

Evaluates the closed-form estimation rate-distortion curves at 0 dB and
10 dB transmit power. At low power the constant waveform needs the lower
rate everywhere; at high power the PAM mixture wins below a crossing
distortion, located here by bisection.
"""

import math
import pathlib

import numpy as np

import isacrd as ir

OUT = pathlib.Path(__file__).parent / "output"


def curves(power_db, order=16):
    power = 10.0 ** (power_db / 10.0)
    params = ir.GaussianSensingParams(sigma_s2=1.0, sigma_n2=1.0, power=power)
    pam = ir.pam_constellation(order, power)
    amp = math.sqrt(power)
    v_det = power
    v_max = float(np.max(pam.amplitudes ** 2))
    lo = max(v_det / (v_det + 1.0), v_max / (v_max + 1.0)) * 1.001
    hi = max(v_det, v_max) * 1.05
    grid = np.linspace(lo, hi, 200)
    det = np.array([ir.gaussian_det_rd(amp, params, float(d)) for d in grid])
    mix = np.array([ir.gaussian_mixture_rd(pam, params, float(d)) for d in grid])
    return grid, det, mix, params, pam, amp


def locate_crossing(params, pam, amp, lo, hi):
    def gap(d):
        return ir.gaussian_det_rd(amp, params, d) - ir.gaussian_mixture_rd(pam, params, d)

    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    OUT.mkdir(exist_ok=True)
    results = {}
    for power_db in (0.0, 10.0):
        grid, det, mix, params, pam, amp = curves(power_db)
        path = OUT / f"gaussian_{power_db:g}dB.csv"
        lines = ["D,R_det_bits,R_pam_bits"]
        lines += [f"{d:.12g},{a:.12g},{b:.12g}" for d, a, b in zip(grid, det, mix)]
        path.write_text("\n".join(lines) + "\n")
        print(f"wrote {path}")
        results[power_db] = (grid, det, mix)

        if power_db == 0.0:
            assert np.all(det <= mix + 1e-12)
            print("0 dB: the constant waveform is never above the PAM mixture")
        else:
            crossing = locate_crossing(params, pam, amp, 5.0, 8.0)
            print(f"10 dB: PAM needs the lower rate for D below {crossing:.3f}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping the plot")
        return
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, (power_db, (grid, det, mix)) in zip(axes, results.items()):
        ax.plot(grid, det, label="deterministic sqrt(P)")
        ax.plot(grid, mix, label="16-PAM mixture")
        ax.set_xlabel("distortion D")
        ax.set_ylabel("estimation rate [bits]")
        ax.set_title(f"{power_db:g} dB")
        ax.legend()
    fig.tight_layout()
    path = OUT / "gaussian_waveforms.png"
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
