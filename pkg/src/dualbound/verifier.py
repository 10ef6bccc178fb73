"""Robustness decisions, certified bound search, and dataset metrics."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .network import Network
from .propagation import (PropagationConfig, compute_domains, margin_bounds_from)

DICHOTOMY_INITIAL_EPS = 0.05
DICHOTOMY_UPDATES = 15
DICHOTOMY_CAP = 1.0


@dataclass
class VerificationOutcome:
    status: str  # 'robust' | 'unknown'
    label: int
    margins: dict[int, float]  # adversary label -> certified lower bound
    time_s: float
    strategy: str
    under_method: str
    n_fallbacks: int = 0

    @property
    def robust(self) -> bool:
        return self.status == "robust"

    @property
    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else np.inf


@dataclass
class CertifiedBound:
    epsilon: float
    iterations: int
    last_verified: float
    first_failed: float


def verify_robust(net: Network, x0, eps: float, cfg: PropagationConfig) -> VerificationOutcome:
    """Certified robustness of the predicted label on the eps ball around x0."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    t0 = time.perf_counter()
    label = net.predicted_label(x0)
    result = compute_domains(net, x0, eps, cfg)
    bounds = margin_bounds_from(net, x0, eps, label, result.relaxations)
    margins = {ell: float(bounds[ell]) for ell in range(bounds.size) if ell != label}
    robust = all(v > 0.0 for v in margins.values())
    return VerificationOutcome(
        status="robust" if robust else "unknown",
        label=label,
        margins=margins,
        time_s=time.perf_counter() - t0,
        strategy=cfg.strategy.value,
        under_method=cfg.describe_under(),
        n_fallbacks=result.n_fallbacks,
    )


def certified_lower_bound(net: Network, x0, cfg: PropagationConfig,
                          initial_eps: float = DICHOTOMY_INITIAL_EPS,
                          updates: int = DICHOTOMY_UPDATES,
                          cap: float = DICHOTOMY_CAP) -> CertifiedBound:
    """Largest verified perturbation radius found by dichotomy.

    Starts at ``initial_eps`` and performs the initial probe plus ``updates``
    further verification calls: doubling while everything verifies (capped
    for normalized inputs), halving into the bracket otherwise, then
    bisecting. Returns the largest radius that verified.
    """
    lo = 0.0
    hi = np.inf
    eps = initial_eps
    for _ in range(updates + 1):
        if verify_robust(net, x0, eps, cfg).robust:
            lo = max(lo, eps)
        else:
            hi = min(hi, eps)
        if np.isinf(hi):
            eps = min(2.0 * eps, cap)
        else:
            eps = 0.5 * (lo + hi)
    return CertifiedBound(epsilon=lo, iterations=updates + 1,
                          last_verified=lo, first_failed=float(hi))


def robustness_ratio(net: Network, dataset, eps: float, cfg: PropagationConfig) -> float:
    """Fraction of the dataset proven robust at fixed eps.

    Misclassified inputs count against the ratio; the denominator is the
    whole dataset.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    verified = 0
    for x, label in dataset:
        outcome = verify_robust(net, x, eps, cfg)
        if outcome.label == int(label) and outcome.robust:
            verified += 1
    return verified / len(dataset)


def overestimation_ratio(s_over: float, s_act: float) -> float:
    """Relative excess of an overestimated span over the actual span."""
    if s_act <= 0:
        raise ValueError("actual span must be positive")
    return (s_over - s_act) / s_act


def improvement_pct(bound: float, baseline: float) -> float | None:
    """Percent improvement of bound over baseline; None when undefined."""
    if baseline == 0:
        return None
    return (bound - baseline) / baseline * 100.0


@dataclass
class StrategyRow:
    strategy: str
    under_method: str
    bounds: list[float]
    mean_bound: float
    improvements: list[float | None]
    mean_improvement: float | None
    time_s: float


@dataclass
class ComparisonTable:
    rows: list[StrategyRow]
    baseline_index: int

    def format(self) -> str:
        lines = [f"{'strategy':<12}{'under':<18}{'mean bound':>12}{'impr %':>10}{'time s':>10}"]
        for row in self.rows:
            impr = "-" if row.mean_improvement is None else f"{row.mean_improvement:.2f}"
            lines.append(f"{row.strategy:<12}{row.under_method:<18}"
                         f"{row.mean_bound:>12.5f}{impr:>10}{row.time_s:>10.2f}")
        return "\n".join(lines)


def compare_strategies(net: Network, inputs, cfg_list: list[PropagationConfig],
                       baseline_index: int = -1) -> ComparisonTable:
    """Certified lower bounds of several configurations on the same inputs.

    Per-input improvement of a configuration over the designated baseline is
    (bound - baseline_bound) / baseline_bound; a zero baseline bound marks
    that input's improvement undefined.
    """
    if len(cfg_list) < 2:
        raise ValueError("need at least two configurations to compare")
    baseline_index = baseline_index % len(cfg_list)
    all_bounds = []
    times = []
    for cfg in cfg_list:
        t0 = time.perf_counter()
        all_bounds.append([certified_lower_bound(net, x, cfg).epsilon for x in inputs])
        times.append(time.perf_counter() - t0)
    base = all_bounds[baseline_index]
    rows = []
    for cfg, bounds, ts in zip(cfg_list, all_bounds, times):
        improvements = [improvement_pct(b, bb) for b, bb in zip(bounds, base)]
        defined = [v for v in improvements if v is not None]
        rows.append(StrategyRow(
            strategy=cfg.strategy.value,
            under_method=cfg.describe_under(),
            bounds=bounds,
            mean_bound=float(np.mean(bounds)) if bounds else np.nan,
            improvements=improvements,
            mean_improvement=float(np.mean(defined)) if defined else None,
            time_s=ts,
        ))
    return ComparisonTable(rows, baseline_index)
