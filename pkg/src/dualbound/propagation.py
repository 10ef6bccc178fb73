"""Symbolic linear bound propagation over the perturbation ball.

Pre-activations of every layer are rewritten as affine functions of the
network input by backward substitution: each post-activation variable is
replaced by its linear lower or upper bound according to the sign of the
coefficient multiplying it, and affine layers substitute exactly. The affine
forms concretize on the l-infinity ball in closed form through the l1 norm
of their coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import S_CURVES
from .network import Network
from .relaxation import DomainPair, NeuronRelaxation, Strategy, relax_baseline, relax_dual
from .under_approx import UnderDomains, gradient_domains, monte_carlo_domains


@dataclass(frozen=True)
class MonteCarloUnder:
    n: int = 1000
    seed: int = 0


@dataclass(frozen=True)
class GradientUnder:
    step_fraction: float = 0.45


UnderMethod = MonteCarloUnder | GradientUnder | None


@dataclass(frozen=True)
class PropagationConfig:
    strategy: Strategy = Strategy.DUAL
    under: UnderMethod = field(default_factory=MonteCarloUnder)

    def __post_init__(self):
        if self.strategy is Strategy.DUAL and self.under is None:
            raise ValueError("the dual strategy requires an under-approximation method")

    def describe_under(self) -> str:
        if self.under is None:
            return "none"
        if isinstance(self.under, MonteCarloUnder):
            return f"mc:{self.under.n}:seed={self.under.seed}"
        return f"grad:{self.under.step_fraction:g}"


@dataclass(frozen=True)
class SymbolicBound:
    """A_L x + c_L <= z <= A_U x + c_U for all x in the ball."""

    lower_coeffs: np.ndarray
    lower_const: np.ndarray
    upper_coeffs: np.ndarray
    upper_const: np.ndarray


@dataclass
class LayerRelaxations:
    """Vectorized bound lines for one activation layer."""

    alpha_L: np.ndarray
    beta_L: np.ndarray
    alpha_U: np.ndarray
    beta_U: np.ndarray
    fallback: np.ndarray  # bool mask

    @classmethod
    def from_neurons(cls, relaxes: list[NeuronRelaxation]) -> "LayerRelaxations":
        return cls(np.array([r.alpha_L for r in relaxes]),
                   np.array([r.beta_L for r in relaxes]),
                   np.array([r.alpha_U for r in relaxes]),
                   np.array([r.beta_U for r in relaxes]),
                   np.array([r.fallback for r in relaxes]))

    @classmethod
    def identity(cls, width: int) -> "LayerRelaxations":
        one = np.ones(width)
        zero = np.zeros(width)
        return cls(one, zero, one, zero, np.zeros(width, dtype=bool))

    def neuron(self, r: int) -> NeuronRelaxation:
        return NeuronRelaxation(float(self.alpha_L[r]), float(self.beta_L[r]),
                                float(self.alpha_U[r]), float(self.beta_U[r]),
                                bool(self.fallback[r]))


@dataclass
class PropagationResult:
    """Per-layer pre-activation over-domains plus the relaxations used."""

    layer_lower: list[np.ndarray]
    layer_upper: list[np.ndarray]
    relaxations: list[LayerRelaxations]  # one per hidden layer
    under: UnderDomains | None

    def domain(self, layer: int, neuron: int) -> tuple[float, float]:
        return float(self.layer_lower[layer][neuron]), float(self.layer_upper[layer][neuron])

    @property
    def n_fallbacks(self) -> int:
        return int(sum(r.fallback.sum() for r in self.relaxations))


def concretize(bound: SymbolicBound, x0, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact extremes of the affine forms over the l-infinity ball."""
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    if bound.lower_coeffs.shape[1] != x0.size or bound.upper_coeffs.shape[1] != x0.size:
        raise ValueError("coefficient width does not match the input size")
    eps = float(eps)
    lo = bound.lower_coeffs @ x0 + bound.lower_const \
        - eps * np.abs(bound.lower_coeffs).sum(axis=1)
    hi = bound.upper_coeffs @ x0 + bound.upper_const \
        + eps * np.abs(bound.upper_coeffs).sum(axis=1)
    return lo, hi


def _substitute(A: np.ndarray, c: np.ndarray, rel: LayerRelaxations, upper: bool):
    """Replace post-activation variables by their bound lines, sign-selected."""
    pos = A >= 0.0
    if upper:
        alpha = np.where(pos, rel.alpha_U, rel.alpha_L)
        beta = np.where(pos, rel.beta_U, rel.beta_L)
    else:
        alpha = np.where(pos, rel.alpha_L, rel.alpha_U)
        beta = np.where(pos, rel.beta_L, rel.beta_U)
    return A * alpha, c + (A * beta).sum(axis=1)


def backward_bound(net: Network, target_weight: np.ndarray, target_bias: np.ndarray,
                   head_layer: int, relaxations: list[LayerRelaxations]) -> SymbolicBound:
    """Symbolic bounds of target_weight @ post(head_layer - 1) + target_bias.

    ``relaxations[j]`` must bound the activation of layer j for every
    j < head_layer. With head_layer 0 the target reads the input directly.
    """
    AU = AL = np.asarray(target_weight, dtype=np.float64)
    cU = cL = np.asarray(target_bias, dtype=np.float64)
    for j in range(head_layer - 1, -1, -1):
        AU, cU = _substitute(AU, cU, relaxations[j], upper=True)
        AL, cL = _substitute(AL, cL, relaxations[j], upper=False)
        W, b = net.affine(j)
        cU = cU + AU @ b
        cL = cL + AL @ b
        AU = AU @ W
        AL = AL @ W
    return SymbolicBound(AL, cL, AU, cU)


def _relax_layer(net: Network, layer: int, lo: np.ndarray, hi: np.ndarray,
                 under: UnderDomains | None, cfg: PropagationConfig) -> LayerRelaxations:
    act_name = net.activation_of(layer)
    if act_name == "identity":
        return LayerRelaxations.identity(lo.size)
    act = S_CURVES[act_name]
    out = []
    for r in range(lo.size):
        if cfg.strategy is Strategy.DUAL:
            dom = DomainPair(lo[r], hi[r],
                             under.lower[layer][r], under.upper[layer][r])
            out.append(relax_dual(act, dom))
        else:
            out.append(relax_baseline(cfg.strategy, act, lo[r], hi[r]))
    return LayerRelaxations.from_neurons(out)


def compute_under_domains(net: Network, x0, eps: float,
                          cfg: PropagationConfig) -> UnderDomains | None:
    if cfg.under is None:
        return None
    if isinstance(cfg.under, MonteCarloUnder):
        return monte_carlo_domains(net, x0, eps, cfg.under.n, cfg.under.seed)
    return gradient_domains(net, x0, eps, cfg.under.step_fraction)


def compute_domains(net: Network, x0, eps: float,
                    cfg: PropagationConfig) -> PropagationResult:
    """Over-domains of every layer plus the relaxations built from them.

    Layers are processed first to last; the relaxation of layer i is built
    from its concretized over-domain (clamping in the under-domain for the
    dual strategy) and reused for all deeper layers.
    """
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    under = compute_under_domains(net, x0, eps, cfg)
    relaxations: list[LayerRelaxations] = []
    lowers: list[np.ndarray] = []
    uppers: list[np.ndarray] = []
    for i in range(net.n_layers):
        W, b = net.affine(i)
        sym = backward_bound(net, W, b, i, relaxations)
        lo, hi = concretize(sym, x0, eps)
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise FloatingPointError(f"non-finite bounds at layer {i}")
        lowers.append(lo)
        uppers.append(hi)
        if i < net.n_layers - 1:
            relaxations.append(_relax_layer(net, i, lo, hi, under, cfg))
    return PropagationResult(lowers, uppers, relaxations, under)


def domains_with_relaxations(net: Network, x0, eps: float, upto_layer: int,
                             relaxations: list[LayerRelaxations]):
    """Over-domain of one layer under externally supplied relaxations."""
    W, b = net.affine(upto_layer)
    sym = backward_bound(net, W, b, upto_layer, relaxations)
    return concretize(sym, x0, eps)


def margin_bounds_from(net: Network, x0, eps: float, label: int,
                       relaxations: list[LayerRelaxations]) -> np.ndarray:
    """Certified lower bounds on logit(label) - logit(other) per other label.

    The difference of the two output rows is substituted backward as a single
    affine form, which is tighter than subtracting separate bounds. Entry
    ``label`` is +inf so a minimum over the array ranges over adversaries.
    """
    W, b = net.affine(net.n_layers - 1)
    m = W.shape[0]
    if not (0 <= label < m):
        raise IndexError(f"label {label} out of range for {m} outputs")
    others = [ell for ell in range(m) if ell != label]
    R = W[label][None, :] - W[others]
    rb = b[label] - b[others]
    sym = backward_bound(net, R, rb, net.n_layers - 1, relaxations)
    lo, _ = concretize(sym, x0, eps)
    out = np.full(m, np.inf)
    out[others] = lo
    return out


def output_margin_bounds(net: Network, x0, eps: float, label: int,
                         cfg: PropagationConfig) -> np.ndarray:
    """Certified margin lower bounds for one labelled input (one pipeline run)."""
    result = compute_domains(net, x0, eps, cfg)
    return margin_bounds_from(net, x0, eps, label, result.relaxations)
