"""Shared generators and independent oracles for the test suite.

Oracles are deliberately written as plain Python loops over the defining
sums, independent of the vectorized library code they check.
"""

import math

import numpy as np

from isacrd import SdmcModel


def random_composition(rng, total, parts):
    """Positive integer composition of ``total`` into ``parts`` parts."""
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False))
    return np.diff(np.concatenate(([0], cuts, [total])))


def random_sdmc(rng, max_size=4, hamming=True):
    """Fully random channel: Dirichlet kernels and prior, optional Hamming distortion."""
    x = int(rng.integers(2, max_size + 1))
    s = int(rng.integers(2, max_size + 1))
    t = int(rng.integers(2, max_size + 1))
    z = int(rng.integers(2, max_size + 1))
    y = int(rng.integers(2, 4))
    prior = rng.dirichlet(np.ones(s))
    sens = rng.dirichlet(np.ones(t), size=(x, s))
    comm = rng.dirichlet(np.ones(y), size=(x, s))
    if hamming:
        d = np.ones((s, z))
        for i in range(min(s, z)):
            d[i, i] = 0.0
    else:
        d = rng.random((s, z))
    return SdmcModel(state_prior=prior, sensing_kernel=sens, comm_kernel=comm,
                     distortion=d)


def random_margin_sdmc(rng, max_size=4):
    """Random channel with separated decision margins.

    Deterministic sensing maps with an eighth-quantized state prior keep every
    nonzero posterior gap at 1/8 or more, so steep-slope sweeps approach the
    minimum distortion to well below 1e-3. Hamming distortion over Z = S.
    """
    s = int(rng.integers(2, max_size + 1))
    x = int(rng.integers(2, max_size + 1))
    t = int(rng.integers(2, max_size + 1))
    y = int(rng.integers(2, 4))
    prior = random_composition(rng, 8, s) / 8.0
    sens = np.zeros((x, s, t))
    mapping = rng.integers(0, t, size=(x, s))
    for i in range(x):
        for j in range(s):
            sens[i, j, mapping[i, j]] = 1.0
    comm = rng.dirichlet(np.ones(y), size=(x, s))
    d = 1.0 - np.eye(s)
    return SdmcModel(state_prior=prior, sensing_kernel=sens, comm_kernel=comm,
                     distortion=d)


def random_px(rng, model):
    return rng.dirichlet(np.ones(model.x_size))


def random_kernel(rng, model):
    return rng.dirichlet(np.ones(model.z_size), size=(model.x_size, model.t_size))


def oracle_joint_xt(model, px):
    out = np.zeros((model.x_size, model.t_size))
    for x in range(model.x_size):
        for t in range(model.t_size):
            acc = 0.0
            for s in range(model.s_size):
                acc += model.state_prior[s] * model.sensing_kernel[x, s, t]
            out[x, t] = px[x] * acc
    return out


def oracle_posterior(model, x, t):
    """Bayes rule by hand; returns None for probability-zero observations."""
    weights = [model.state_prior[s] * model.sensing_kernel[x, s, t]
               for s in range(model.s_size)]
    total = sum(weights)
    if total == 0.0:
        return None
    return np.array(weights) / total


def oracle_cmi_nats(joint, kernel):
    """Direct triple-loop I(T; Z | X) in nats."""
    x_size, t_size = joint.shape
    z_size = kernel.shape[2]
    px = joint.sum(axis=1)
    total = 0.0
    for x in range(x_size):
        if px[x] == 0.0:
            continue
        marg = np.zeros(z_size)
        for t in range(t_size):
            for z in range(z_size):
                marg[z] += joint[x, t] / px[x] * kernel[x, t, z]
        for t in range(t_size):
            if joint[x, t] == 0.0:
                continue
            for z in range(z_size):
                p = kernel[x, t, z]
                if p > 0.0:
                    total += joint[x, t] * p * math.log(p / marg[z])
    return total


def oracle_expected_distortion(model, px, kernel):
    """Full product-law summation over (x, s, t, z)."""
    total = 0.0
    for x in range(model.x_size):
        for s in range(model.s_size):
            for t in range(model.t_size):
                for z in range(model.z_size):
                    total += (px[x] * model.state_prior[s]
                              * model.sensing_kernel[x, s, t]
                              * kernel[x, t, z] * model.distortion[s, z])
    return total


def brute_force_min_distortion(model, px):
    """Minimum expected distortion over every deterministic decision map.

    Enumerates all |Z| ** (|X| |T|) maps; evaluation mirrors the library's
    weighted-sum expression so that equality can be checked exactly.
    """
    import itertools

    px = np.asarray(px, dtype=float)
    px = px / px.sum()  # same canonicalization the library applies
    joint = px[:, None] * np.asarray(model.t_given_x)
    cond = np.asarray(model.conditional_distortion)
    x_size, t_size, z_size = cond.shape
    best = math.inf
    cells = [(x, t) for x in range(x_size) for t in range(t_size)]
    for choice in itertools.product(range(z_size), repeat=len(cells)):
        picked = np.empty((x_size, t_size))
        for (x, t), z in zip(cells, choice):
            picked[x, t] = cond[x, t, z]
        value = math.fsum(np.ravel(joint * picked))
        if value < best:
            best = value
    return best


def binary_spec_text(q=0.5, bad_row=False):
    """Handwritten JSON document for the binary multiplicative channel."""
    row_x0_s0 = "[0.98, 0.0]" if bad_row else "[1.0, 0.0]"
    return f"""{{
  "alphabets": {{"x": 2, "s": 2, "t": 2, "y": 2, "z": 2}},
  "state_prior": [{1 - q}, {q}],
  "sensing_kernel": [
    [{row_x0_s0}, [1.0, 0.0]],
    [[1.0, 0.0], [0.0, 1.0]]
  ],
  "comm_kernel": [
    [[1.0, 0.0], [1.0, 0.0]],
    [[1.0, 0.0], [0.0, 1.0]]
  ],
  "distortion": [[0.0, 1.0], [1.0, 0.0]],
  "input_cost": [0.0, 0.0]
}}
"""
