"""Channel data model and shared probability primitives.

The central object is :class:`SdmcModel`, a finite state-dependent memoryless
channel with two outputs per use: a communication output Y observed by the
receiver and a sensing observation T fed back to the transmitter. The state S
is drawn i.i.d. from a prior, the channel input is X, and a state estimate Z
is scored by a per-symbol distortion d(s, z). An optional per-input cost b(x)
supports average input-cost budgets.

All distributions are dense numpy arrays over finite alphabets. Probability
rows are validated to 1e-9 on ingestion (channel documents carry decimal
round-off) and then renormalized exactly, so downstream code can rely on
row-stochasticity at machine precision. Information quantities are computed
with natural logarithms internally and converted to bits on request.

Every object in this module is immutable after construction (arrays are
marked read-only), so models can be shared freely across worker threads.
"""

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import rel_entr

LN2 = math.log(2.0)

# Ingestion tolerance for probability rows; rows are renormalized after the check.
ROW_SUM_TOL = 1e-9


class ValidationError(ValueError):
    """A document, tensor, or distribution failed structural validation."""


class InfeasibleError(ValueError):
    """A requested budget or target lies outside the feasible set."""


class ConvergenceError(RuntimeError):
    """An iterative search stalled before reaching its tolerance."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def as_pmf(values, size=None, what="distribution") -> np.ndarray:
    """Validate an array-like as a probability vector and renormalize it exactly.

    Entries must be nonnegative and sum to 1 within ``ROW_SUM_TOL``. Returns a
    fresh read-only float64 array.
    """
    p = np.array(values, dtype=float)
    if p.ndim != 1:
        raise ValidationError(f"{what} must be one-dimensional")
    if size is not None and p.shape[0] != size:
        raise ValidationError(f"{what} has length {p.shape[0]}, expected {size}")
    if not np.all(np.isfinite(p)):
        raise ValidationError(f"{what} has non-finite entries")
    if np.any(p < 0):
        idx = int(np.argmax(p < 0))
        raise ValidationError(f"{what}[{idx}] is negative")
    total = float(p.sum())
    if abs(total - 1.0) > ROW_SUM_TOL:
        raise ValidationError(f"{what} sums to {total!r}, expected 1 within {ROW_SUM_TOL}")
    p /= total
    p.flags.writeable = False
    return p


def _check_rows(arr: np.ndarray, name: str) -> np.ndarray:
    """Check that the trailing axis of ``arr`` holds probability rows; renormalize."""
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    if np.any(arr < 0):
        idx = np.unravel_index(int(np.argmax(arr < 0)), arr.shape)
        path = "".join(f"[{i}]" for i in idx)
        raise ValidationError(f"{name}{path} is negative")
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOL
    if np.any(bad):
        idx = np.unravel_index(int(np.argmax(bad)), sums.shape)
        path = "".join(f"[{i}]" for i in idx)
        raise ValidationError(
            f"{name}{path} sums to {float(sums[idx])!r}, expected 1 within {ROW_SUM_TOL}"
        )
    return arr / sums[..., None]


@dataclass(frozen=True, eq=False)
class PosteriorS:
    """State posterior P(s | x, t), defined only where P(t | x) > 0.

    ``probs[x, t, s]`` holds the posterior; rows with a probability-zero
    conditioning event are flagged in ``defined`` and zero-filled rather than
    filled with a uniform fallback, so impossible observations never enter an
    optimization.
    """

    probs: np.ndarray   # (X, T, S)
    defined: np.ndarray  # (X, T) bool


@dataclass(frozen=True, eq=False)
class SdmcModel:
    """A finite state-dependent memoryless channel.

    Fields
    ------
    state_prior : (S,) probability vector for the i.i.d. state.
    sensing_kernel : (X, S, T) tensor; ``[x, s]`` rows are P(t | x, s).
    comm_kernel : (X, S, Y) tensor; ``[x, s]`` rows are P(y | x, s).
    distortion : (S, Z) nonnegative matrix d(s, z).
    input_cost : (X,) nonnegative vector b(x); defaults to all-zero.
    labels : optional display names per alphabet, ignored by all computation.
    """

    state_prior: np.ndarray
    sensing_kernel: np.ndarray
    comm_kernel: np.ndarray
    distortion: np.ndarray
    input_cost: np.ndarray | None = None
    labels: dict | None = None

    def __post_init__(self):
        sp = np.array(self.state_prior, dtype=float)
        sens = np.array(self.sensing_kernel, dtype=float)
        comm = np.array(self.comm_kernel, dtype=float)
        dist = np.array(self.distortion, dtype=float)

        if sp.ndim != 1:
            raise ValidationError("state_prior must be one-dimensional")
        s_size = sp.shape[0]
        if sens.ndim != 3:
            raise ValidationError("sensing_kernel must be indexed [x][s][t]")
        if comm.ndim != 3:
            raise ValidationError("comm_kernel must be indexed [x][s][y]")
        if dist.ndim != 2:
            raise ValidationError("distortion must be indexed [s][z]")
        x_size = sens.shape[0]
        if sens.shape[1] != s_size:
            raise ValidationError(
                f"sensing_kernel state axis has size {sens.shape[1]}, expected {s_size}"
            )
        if comm.shape[0] != x_size or comm.shape[1] != s_size:
            raise ValidationError(
                f"comm_kernel leading axes are {comm.shape[:2]}, expected {(x_size, s_size)}"
            )
        if dist.shape[0] != s_size:
            raise ValidationError(
                f"distortion state axis has size {dist.shape[0]}, expected {s_size}"
            )
        if not np.all(np.isfinite(dist)):
            raise ValidationError("distortion has non-finite entries")
        if np.any(dist < 0):
            i, j = np.unravel_index(int(np.argmax(dist < 0)), dist.shape)
            raise ValidationError(f"distortion[{i}][{j}] is negative")

        sp = np.asarray(as_pmf(sp, what="state_prior"))
        sens = _check_rows(sens, "sensing_kernel")
        comm = _check_rows(comm, "comm_kernel")

        if self.input_cost is None:
            cost = np.zeros(x_size)
        else:
            cost = np.array(self.input_cost, dtype=float)
            if cost.shape != (x_size,):
                raise ValidationError(f"input_cost has shape {cost.shape}, expected ({x_size},)")
            if not np.all(np.isfinite(cost)):
                raise ValidationError("input_cost has non-finite entries")
            if np.any(cost < 0):
                idx = int(np.argmax(cost < 0))
                raise ValidationError(f"input_cost[{idx}] is negative")

        for arr in (sp, sens, comm, dist, cost):
            arr.flags.writeable = False
        object.__setattr__(self, "state_prior", sp)
        object.__setattr__(self, "sensing_kernel", sens)
        object.__setattr__(self, "comm_kernel", comm)
        object.__setattr__(self, "distortion", dist)
        object.__setattr__(self, "input_cost", cost)

    @property
    def x_size(self) -> int:
        return self.sensing_kernel.shape[0]

    @property
    def s_size(self) -> int:
        return self.state_prior.shape[0]

    @property
    def t_size(self) -> int:
        return self.sensing_kernel.shape[2]

    @property
    def y_size(self) -> int:
        return self.comm_kernel.shape[2]

    @property
    def z_size(self) -> int:
        return self.distortion.shape[1]

    @property
    def d_max(self) -> float:
        return float(self.distortion.max())

    @cached_property
    def t_given_x(self) -> np.ndarray:
        """P(t | x) with the state integrated out, shape (X, T)."""
        out = np.einsum("s,xst->xt", self.state_prior, self.sensing_kernel)
        out.flags.writeable = False
        return out

    @cached_property
    def posterior(self) -> PosteriorS:
        """State posterior given (input, observation); see :class:`PosteriorS`."""
        num = np.einsum("s,xst->xts", self.state_prior, self.sensing_kernel)
        defined = self.t_given_x > 0
        denom = np.where(defined, self.t_given_x, 1.0)[:, :, None]
        probs = np.where(defined[:, :, None], num / denom, 0.0)
        probs.flags.writeable = False
        mask = defined.copy()
        mask.flags.writeable = False
        return PosteriorS(probs=probs, defined=mask)

    @cached_property
    def conditional_distortion(self) -> np.ndarray:
        """Expected distortion of answering z after seeing (x, t), shape (X, T, Z).

        Zero on cells whose posterior is undefined; such cells carry no
        probability weight anywhere in this package.
        """
        out = np.einsum("xts,sz->xtz", self.posterior.probs, self.distortion)
        out.flags.writeable = False
        return out

    def content_hash(self) -> str:
        """Hex digest of the numeric content (labels excluded)."""
        h = hashlib.sha256()
        for arr in (self.state_prior, self.sensing_kernel, self.comm_kernel,
                    self.distortion, self.input_cost):
            h.update(str(arr.shape).encode())
            h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
        return h.hexdigest()


def joint_xt(model: SdmcModel, px) -> np.ndarray:
    """Joint law P(x, t) = P(x) * sum_s P(s) P(t | x, s), shape (X, T)."""
    px = as_pmf(px, model.x_size, "input distribution")
    return px[:, None] * model.t_given_x


def posterior_s_given_xt(model: SdmcModel) -> PosteriorS:
    """State posterior P(s | x, t); input-distribution independent."""
    return model.posterior


def conditional_mutual_information(joint, kernel, unit: str = "nats") -> float:
    """I(T; Z | X) of an estimator kernel under the joint input/observation law.

    Computed as the conditional divergence of P(z | x, t) against the induced
    marginal P(z | x), weighted by ``joint``. Cells with zero joint mass are
    skipped, and the 0 log 0 = 0 convention applies throughout.
    """
    joint = np.asarray(joint, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    px = joint.sum(axis=1)
    safe_px = np.where(px > 0, px, 1.0)
    cond_z = np.einsum("xt,xtz->xz", joint, kernel) / safe_px[:, None]
    cell_kl = rel_entr(kernel, cond_z[:, None, :]).sum(axis=2)
    mask = joint > 0
    value = float(np.sum(joint[mask] * cell_kl[mask]))
    if not np.isfinite(value):
        raise RuntimeError("kernel places mass outside its induced conditional support")
    value = max(value, 0.0)
    if unit == "bits":
        return value / LN2
    if unit != "nats":
        raise ValueError(f"unknown unit {unit!r}")
    return value


def expected_distortion(model: SdmcModel, px, kernel) -> float:
    """Average distortion E[d(S, Z)] of an estimator kernel under ``px``."""
    kernel = np.asarray(kernel, dtype=float)
    w = joint_xt(model, px)
    per_cell = np.einsum("xtz,xtz->xt", kernel, model.conditional_distortion)
    return float(np.sum(w * per_cell))


_REQUIRED_FIELDS = ("alphabets", "state_prior", "sensing_kernel", "comm_kernel", "distortion")
_ALPHABET_KEYS = ("x", "s", "t", "y", "z")


def _nested_lengths(obj, name, lengths):
    """Check a nested list against expected per-level lengths, naming the path."""
    stack = [(obj, name, lengths)]
    while stack:
        node, path, want = stack.pop()
        if not isinstance(node, list):
            raise ValidationError(f"{path} must be a list")
        if len(node) != want[0]:
            raise ValidationError(f"{path} has length {len(node)}, expected {want[0]}")
        if len(want) > 1:
            for i, child in enumerate(node):
                stack.append((child, f"{path}[{i}]", want[1:]))


def load_channel_spec(text: str) -> SdmcModel:
    """Parse a JSON channel document and return a validated :class:`SdmcModel`.

    The document schema is described in the package README; dimension and
    row-sum problems are reported with the offending index path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed channel document: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("channel document must be a JSON object")
    missing = [f for f in _REQUIRED_FIELDS if f not in doc]
    if missing:
        raise ValidationError(f"channel document missing fields: {', '.join(missing)}")

    alph = doc["alphabets"]
    if not isinstance(alph, dict):
        raise ValidationError("alphabets must be an object with keys x, s, t, y, z")
    sizes = {}
    for key in _ALPHABET_KEYS:
        if key not in alph:
            raise ValidationError(f"alphabets missing key {key!r}")
        val = alph[key]
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise ValidationError(f"alphabets[{key!r}] must be a positive integer")
        sizes[key] = val

    x, s, t, y, z = (sizes[k] for k in _ALPHABET_KEYS)
    _nested_lengths(doc["state_prior"], "state_prior", (s,))
    _nested_lengths(doc["sensing_kernel"], "sensing_kernel", (x, s, t))
    _nested_lengths(doc["comm_kernel"], "comm_kernel", (x, s, y))
    _nested_lengths(doc["distortion"], "distortion", (s, z))
    input_cost = doc.get("input_cost")
    if input_cost is not None:
        _nested_lengths(input_cost, "input_cost", (x,))
    labels = doc.get("labels")
    if labels is not None and not isinstance(labels, dict):
        raise ValidationError("labels must be an object")

    try:
        return SdmcModel(
            state_prior=doc["state_prior"],
            sensing_kernel=doc["sensing_kernel"],
            comm_kernel=doc["comm_kernel"],
            distortion=doc["distortion"],
            input_cost=input_cost,
            labels=labels,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"channel document has malformed numeric content: {exc}") from None


def channel_spec_text(model: SdmcModel) -> str:
    """Serialize a model back to the JSON channel-document format."""
    doc = {
        "alphabets": {
            "x": model.x_size, "s": model.s_size, "t": model.t_size,
            "y": model.y_size, "z": model.z_size,
        },
        "state_prior": model.state_prior.tolist(),
        "sensing_kernel": model.sensing_kernel.tolist(),
        "comm_kernel": model.comm_kernel.tolist(),
        "distortion": model.distortion.tolist(),
        "input_cost": model.input_cost.tolist(),
    }
    if model.labels is not None:
        doc["labels"] = model.labels
    return json.dumps(doc, indent=2) + "\n"
