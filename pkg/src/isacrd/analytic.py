"""Closed-form references and example channel builders.

These functions give independent analytic values for the channels the
numerical solvers are validated against: the binary channel with a
multiplicative Bernoulli state, the 4-ary product channel, and the real
Gaussian echo-sensing model with deterministic or PAM inputs. All rates are
in bits.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .model import LN2, SdmcModel, ValidationError


def binary_entropy(p: float) -> float:
    """H_b(p) in bits, with 0 log 0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"binary entropy argument must lie in [0, 1], got {p}")
    return float(-(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)) / LN2)


def binary_mult_rate(p0: float, q: float, d: float) -> float:
    """Estimation rate-distortion value of the binary multiplicative channel.

    ``p0`` is the probability of sending the silent input 0 (which blanks the
    observation), ``q`` the probability the state is 1. The informative branch
    reduces to lossy coding of a Bernoulli(q) source, giving

        R(D) = (1 - p0) * (H_b(q) - H_b((D - p0*m) / (1 - p0))),  m = min(q, 1-q),

    on D in [p0*m, m]; the lower endpoint is the minimum achievable
    distortion, the upper endpoint gives rate zero.
    """
    if not 0.0 <= p0 <= 0.5:
        raise ValidationError(f"silent-input probability must lie in [0, 0.5], got {p0}")
    if not 0.0 < q < 1.0:
        raise ValidationError(f"state probability must lie in (0, 1), got {q}")
    m = min(q, 1.0 - q)
    lo = p0 * m
    # endpoint slack absorbs stopping-tolerance round-off from numerical sweeps
    if d < lo - 1e-6 or d > m + 1e-6:
        raise ValidationError(
            f"distortion {d} outside the valid range [{lo}, {m}]"
        )
    d = min(max(d, lo), m)
    arg = (d - lo) / (1.0 - p0)
    return max((1.0 - p0) * (binary_entropy(q) - binary_entropy(arg)), 0.0)


def binary_mult_capacity(p0: float, q: float) -> float:
    """Communication rate q * H_b(p0) of the binary multiplicative channel."""
    if not 0.0 <= p0 <= 0.5:
        raise ValidationError(f"silent-input probability must lie in [0, 0.5], got {p0}")
    if not 0.0 < q < 1.0:
        raise ValidationError(f"state probability must lie in (0, 1), got {q}")
    return q * binary_entropy(p0)


@dataclass(frozen=True)
class GaussianSensingParams:
    """Echo-sensing channel parameters: state and noise variances, power budget."""

    sigma_s2: float
    sigma_n2: float
    power: float

    def __post_init__(self):
        for name in ("sigma_s2", "sigma_n2", "power"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")


def gaussian_det_rd(amplitude: float, params: GaussianSensingParams, d: float) -> float:
    """Rate-distortion value for a fixed (uncoded) waveform amplitude, in bits.

    The echo T = S*x + N makes the state a Gaussian source observed through
    scaling and additive noise; under quadratic distortion

        R_x(D) = 0.5 * log2( v^2 / (D*(v + sn) - v*sn) ),   v = x^2 ss, sn noise var,

    on D in (v*sn/(v + sn), v]. Above the upper endpoint the rate is zero;
    at or below the lower (smoothing MMSE) endpoint the value is +inf.
    """
    v = amplitude * amplitude * params.sigma_s2
    sn = params.sigma_n2
    upper = v
    lower = v * sn / (v + sn) if v > 0 else 0.0
    if d > upper:
        return 0.0
    if d <= lower:
        return math.inf
    denom = d * (v + sn) - v * sn
    return 0.5 * math.log2(v * v / denom)


@dataclass(frozen=True, eq=False)
class PamConstellation:
    """Uniform M-point amplitude constellation scaled to a mean power."""

    order: int
    spacing: float
    amplitudes: np.ndarray

    @property
    def mean_power(self) -> float:
        return float(np.mean(self.amplitudes ** 2))


def pam_constellation(m: int, power: float) -> PamConstellation:
    """M-ary PAM points (2i - 1 - M)k, i = 1..M, with k chosen to meet the power.

    ``k = sqrt(3 P / (M^2 - 1))`` makes the uniform-weight mean power exactly P.
    """
    if m < 2 or m % 2 != 0:
        raise ValidationError(f"PAM order must be an even integer >= 2, got {m}")
    if not power > 0:
        raise ValidationError(f"power must be positive, got {power}")
    k = math.sqrt(3.0 * power / (m * m - 1.0))
    amplitudes = k * (2.0 * np.arange(1, m + 1) - 1.0 - m)
    amplitudes.flags.writeable = False
    return PamConstellation(order=m, spacing=k, amplitudes=amplitudes)


def gaussian_mixture_rd(constellation: PamConstellation,
                        params: GaussianSensingParams, d: float) -> float:
    """Average of the fixed-amplitude rate over a uniformly weighted constellation.

    Valid for distortions at or above the largest per-amplitude MMSE endpoint;
    below that threshold the mixture expression does not apply and a
    :class:`ValidationError` is raised.
    """
    amps = constellation.amplitudes
    v = amps * amps * params.sigma_s2
    sn = params.sigma_n2
    threshold = float(np.max(v * sn / (v + sn)))
    if d < threshold:
        raise ValidationError(
            f"distortion {d} below the mixture validity threshold {threshold}"
        )
    terms = [gaussian_det_rd(float(a), params, d) for a in amps]
    return float(np.mean(terms))


def build_binary_multiplicative_channel(q: float) -> SdmcModel:
    """Binary channel Y = S*X with Bernoulli(q) state, echo feedback T = Y.

    Hamming distortion on the state estimate, zero input cost.
    """
    if not 0.0 < q < 1.0:
        raise ValidationError(f"state probability must lie strictly inside (0, 1), got {q}")
    kernel = np.zeros((2, 2, 2))
    for x in range(2):
        for s in range(2):
            kernel[x, s, s * x] = 1.0
    distortion = 1.0 - np.eye(2)
    return SdmcModel(
        state_prior=np.array([1.0 - q, q]),
        sensing_kernel=kernel,
        comm_kernel=kernel.copy(),
        distortion=distortion,
        labels={"x": ["0", "1"], "s": ["0", "1"], "t": ["0", "1"],
                "y": ["0", "1"], "z": ["0", "1"]},
    )


def build_product_dmc(state_prior) -> SdmcModel:
    """4-ary channel Y = T = S*X over X = S = {0, 1, 2, 3}.

    The output alphabet is the sorted list of distinct products
    {0, 1, 2, 3, 4, 6, 9}; kernels are deterministic and the state estimate is
    scored with Hamming distortion over {0, 1, 2, 3}.
    """
    prior = np.asarray(state_prior, dtype=float)
    if prior.shape != (4,):
        raise ValidationError(f"state prior must have length 4, got shape {prior.shape}")
    symbols = list(range(4))
    products = sorted({s * x for s in symbols for x in symbols})
    index = {value: i for i, value in enumerate(products)}
    kernel = np.zeros((4, 4, len(products)))
    for x in symbols:
        for s in symbols:
            kernel[x, s, index[s * x]] = 1.0
    distortion = 1.0 - np.eye(4)
    out_labels = [str(v) for v in products]
    return SdmcModel(
        state_prior=prior,
        sensing_kernel=kernel,
        comm_kernel=kernel.copy(),
        distortion=distortion,
        labels={"x": [str(v) for v in symbols], "s": [str(v) for v in symbols],
                "t": out_labels, "y": out_labels, "z": [str(v) for v in symbols]},
    )
