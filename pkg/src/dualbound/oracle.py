"""Brute-force ground truth on tiny networks for testing.

Dense-grid enumeration is exact in the limit and restricted to at most
3 input dimensions; random sampling scales further but only yields inner
(one-sided) estimates, so assertions against it must be phrased accordingly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .network import Network

_GRID_DIM_LIMIT = 3


@dataclass(frozen=True)
class OracleConfig:
    mode: str = "grid"  # 'grid' | 'sample'
    points_per_dim: int = 101
    n: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("grid", "sample"):
            raise ValueError(f"unknown oracle mode {self.mode!r}")
        if self.mode == "grid" and self.points_per_dim < 2:
            raise ValueError("need at least 2 points per dimension")


def _ball_points(net: Network, x0: np.ndarray, eps: float, ocfg: OracleConfig) -> np.ndarray:
    lo = x0 - eps
    hi = x0 + eps
    if net.input_range is not None:
        lo = np.maximum(lo, net.input_range[0])
        hi = np.minimum(hi, np.maximum(net.input_range[1], lo))
    d = x0.size
    if ocfg.mode == "grid":
        if d > _GRID_DIM_LIMIT:
            raise ValueError(f"dense grid limited to {_GRID_DIM_LIMIT} input dims, got {d}")
        axes = [np.linspace(lo[j], hi[j], ocfg.points_per_dim) for j in range(d)]
        pts = np.array(list(itertools.product(*axes)))
    else:
        rng = np.random.default_rng(ocfg.seed)
        pts = lo + rng.random((ocfg.n, d)) * (hi - lo)
    return np.vstack([x0[None, :], pts])


def actual_neuron_domain(net: Network, x0, eps: float, layer: int, neuron: int,
                         ocfg: OracleConfig) -> tuple[float, float]:
    """Observed pre-activation range of one neuron over the ball."""
    lo, hi = actual_layer_domains(net, x0, eps, ocfg)
    return float(lo[layer][neuron]), float(hi[layer][neuron])


def actual_layer_domains(net: Network, x0, eps: float, ocfg: OracleConfig):
    """Observed pre-activation ranges of every neuron, one evaluation sweep."""
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    pts = _ball_points(net, x0, eps, ocfg)
    pres = net.forward_batch(pts)
    lowers = [z.min(axis=0) for z in pres]
    uppers = [z.max(axis=0) for z in pres]
    return lowers, uppers


def exhaustive_margin(net: Network, x0, eps: float, label: int,
                      ocfg: OracleConfig) -> float:
    """Smallest observed logit margin of label against the best adversary."""
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    pts = _ball_points(net, x0, eps, ocfg)
    logits = net.forward_batch(pts)[-1]
    own = logits[:, label]
    others = np.delete(logits, label, axis=1)
    return float((own - others.max(axis=1)).min())


def _grid_has_counterexample(net: Network, x0, eps, label, ocfg) -> bool:
    pts = _ball_points(net, np.asarray(x0, dtype=np.float64).reshape(-1), eps, ocfg)
    logits = net.forward_batch(pts)
    preds = np.argmax(logits[-1], axis=1)
    return bool((preds != label).any())


def true_robust_radius(net: Network, x0, ocfg: OracleConfig,
                       resolution: float = 1e-4, cap: float = 1.0) -> float:
    """Largest radius with no grid counterexample, by bisection.

    This is an upper-bound estimate of the true robust radius (a finer grid
    can only find more counterexamples); certified bounds must stay below it.
    """
    label = net.predicted_label(x0)
    if _grid_has_counterexample(net, x0, 0.0, label, ocfg):
        return 0.0
    if not _grid_has_counterexample(net, x0, cap, label, ocfg):
        return cap
    lo, hi = 0.0, cap
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if _grid_has_counterexample(net, x0, mid, label, ocfg):
            hi = mid
        else:
            lo = mid
    return lo
