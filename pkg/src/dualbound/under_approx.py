"""Underestimated per-neuron input domains via sampling or gradient steps.

Both methods report, for every hidden neuron, an interval of pre-activation
values that concrete inputs inside the perturbation ball actually attain.
Each reported bound carries its witness input, and the stored bound is the
single-vector forward value of that witness, so re-evaluating the witness
reproduces the bound exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Network

_CHUNK = 2048


@dataclass
class UnderDomains:
    """Per hidden layer: bounds plus the inputs that attain them."""

    lower: list[np.ndarray]
    upper: list[np.ndarray]
    witness_lower: list[np.ndarray]  # (width, input_size)
    witness_upper: list[np.ndarray]
    method: str
    n_samples: int | None = None
    step_fraction: float | None = None
    rng_seed: int | None = None
    extra: dict = field(default_factory=dict)

    def interval(self, layer: int, neuron: int) -> tuple[float, float]:
        return float(self.lower[layer][neuron]), float(self.upper[layer][neuron])


def _sample_box(net: Network, x0: np.ndarray, eps: float):
    lo = x0 - eps
    hi = x0 + eps
    if net.input_range is not None:
        lo = np.maximum(lo, net.input_range[0])
        hi = np.minimum(hi, net.input_range[1])
    return lo, np.maximum(hi, lo)


def _reevaluate(net: Network, hidden: list[int], witness_lower, witness_upper):
    """Single-vector forward values of every witness, per layer.

    Swaps a witness pair whenever its re-evaluated values come out inverted,
    so witness_lower always attains the lower bound and vice versa.
    """
    lower, upper = [], []
    for idx, i in enumerate(hidden):
        width = net.width(i)
        lo = np.empty(width)
        hi = np.empty(width)
        for r in range(width):
            _, trace = net.forward(witness_lower[idx][r])
            lo[r] = trace[i].pre_activation[r]
            _, trace = net.forward(witness_upper[idx][r])
            hi[r] = trace[i].pre_activation[r]
        inverted = lo > hi
        if inverted.any():
            wl = witness_lower[idx][inverted].copy()
            witness_lower[idx][inverted] = witness_upper[idx][inverted]
            witness_upper[idx][inverted] = wl
            lo[inverted], hi[inverted] = hi[inverted], lo[inverted].copy()
        lower.append(lo)
        upper.append(hi)
    return lower, upper


def monte_carlo_domains(net: Network, x0, eps: float, n: int, seed: int) -> UnderDomains:
    """Per-neuron min/max of pre-activations over n uniform ball samples.

    The unperturbed input is always sample 0, so domains are never empty.
    Sampling is prefix-stable: the first n1 samples of a run with n2 > n1
    samples and the same seed are identical to the n1-sample run.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    eps = float(eps)
    lo_box, hi_box = _sample_box(net, x0, eps)
    hidden = list(net.hidden_indices)
    rng = np.random.default_rng(seed)

    best_lo = [np.full(net.width(i), np.inf) for i in hidden]
    best_hi = [np.full(net.width(i), -np.inf) for i in hidden]
    wit_lo = [np.tile(x0, (net.width(i), 1)) for i in hidden]
    wit_hi = [np.tile(x0, (net.width(i), 1)) for i in hidden]

    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        if done == 0:
            block = lo_box + rng.random((m, x0.size)) * (hi_box - lo_box)
            block[0] = x0
        else:
            block = lo_box + rng.random((m, x0.size)) * (hi_box - lo_box)
        pres = net.forward_batch(block)
        for idx, i in enumerate(hidden):
            z = pres[i]
            jmin = np.argmin(z, axis=0)
            jmax = np.argmax(z, axis=0)
            cols = np.arange(z.shape[1])
            zmin = z[jmin, cols]
            zmax = z[jmax, cols]
            better = zmin < best_lo[idx]
            best_lo[idx] = np.where(better, zmin, best_lo[idx])
            wit_lo[idx][better] = block[jmin[better]]
            better = zmax > best_hi[idx]
            best_hi[idx] = np.where(better, zmax, best_hi[idx])
            wit_hi[idx][better] = block[jmax[better]]
        done += m

    lower, upper = _reevaluate(net, hidden, wit_lo, wit_hi)
    return UnderDomains(lower, upper, wit_lo, wit_hi,
                        method="monte_carlo", n_samples=n, rng_seed=seed)


def gradient_domains(net: Network, x0, eps: float,
                     step_fraction: float = 0.45) -> UnderDomains:
    """One gradient-sign step per neuron in each direction.

    For neuron r the step direction is the sign of its input gradient at the
    center; candidates are the center plus one step down and one step up,
    clipped to the ball (and the declared input range, if any). Taking the
    min and max over all three evaluations guards against overshoot on
    non-monotone deep neurons.
    """
    if not (0.0 <= step_fraction <= 1.0):
        raise ValueError("step fraction must lie in [0, 1]")
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    eps = float(eps)
    lo_box, hi_box = _sample_box(net, x0, eps)
    hidden = list(net.hidden_indices)
    jacs = net.layer_jacobians(x0)
    step = step_fraction * eps

    wit_lo, wit_hi = [], []
    for i in hidden:
        eta = np.sign(jacs[i])  # (width, input_size)
        xl = np.clip(x0 - step * eta, lo_box, hi_box)
        xu = np.clip(x0 + step * eta, lo_box, hi_box)
        wit_lo.append(xl)
        wit_hi.append(xu)

    lower, upper = _reevaluate(net, hidden, wit_lo, wit_hi)
    # the center is always a valid witness; keep it when a step lost ground
    _, trace = net.forward(x0)
    for idx, i in enumerate(hidden):
        z0 = trace[i].pre_activation
        take = z0 < lower[idx]
        lower[idx] = np.where(take, z0, lower[idx])
        wit_lo[idx][take] = x0
        take = z0 > upper[idx]
        upper[idx] = np.where(take, z0, upper[idx])
        wit_hi[idx][take] = x0
    return UnderDomains(lower, upper, wit_lo, wit_hi,
                        method="gradient", step_fraction=step_fraction)
