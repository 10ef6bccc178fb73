import numpy as np
import pytest

from dualbound.network import DenseLayer, Network
from dualbound.oracle import (OracleConfig, actual_layer_domains,
                              actual_neuron_domain, exhaustive_margin,
                              true_robust_radius)
from dualbound.propagation import MonteCarloUnder, PropagationConfig, compute_domains
from dualbound.relaxation import Strategy
from dualbound.synth import synthesize


def test_linear_first_layer_matches_closed_form():
    rng = np.random.default_rng(1)
    W = rng.standard_normal((3, 2))
    b = rng.standard_normal(3)
    net = Network((2,), [DenseLayer(W, b, "sigmoid"),
                         DenseLayer(np.zeros((2, 3)), np.zeros(2), "identity")])
    x0 = np.array([0.4, -0.6])
    eps = 0.3
    lo, hi = actual_neuron_domain(net, x0, eps, 0, 1,
                                  OracleConfig(mode="grid", points_per_dim=1000))
    want_lo = W[1] @ x0 + b[1] - eps * np.abs(W[1]).sum()
    want_hi = W[1] @ x0 + b[1] + eps * np.abs(W[1]).sum()
    assert abs(lo - want_lo) < 1e-6
    assert abs(hi - want_hi) < 1e-6


def test_eps_zero_point_interval():
    net = synthesize("FNN_1x3", seed=2, activation="tanh", input_shape=(2,), n_classes=2)
    x0 = np.array([0.2, 0.1])
    _, trace = net.forward(x0)
    lo, hi = actual_neuron_domain(net, x0, 0.0, 0, 0,
                                  OracleConfig(mode="grid", points_per_dim=5))
    assert lo == hi == trace[0].pre_activation[0]


def test_grid_mode_dimension_limit():
    net = synthesize("FNN_1x3", seed=2, activation="tanh", input_shape=(5,), n_classes=2)
    with pytest.raises(ValueError):
        actual_layer_domains(net, np.zeros(5), 0.1,
                             OracleConfig(mode="grid", points_per_dim=5))


def test_sampling_mode_allows_high_dims():
    net = synthesize("FNN_1x3", seed=2, activation="tanh", input_shape=(5,), n_classes=2)
    lo, hi = actual_layer_domains(net, np.zeros(5), 0.1,
                                  OracleConfig(mode="sample", n=500, seed=0))
    assert lo[0].shape == (3,)
    assert (lo[0] <= hi[0]).all()


def test_domains_grow_with_grid_density():
    net = synthesize("FNN_2x5", seed=5, activation="sigmoid",
                     input_shape=(2,), n_classes=2, gain=2.0)
    x0 = np.array([0.1, -0.2])
    # the denser grid contains the sparser one, so ranges can only widen
    sparse_lo, sparse_hi = actual_layer_domains(net, x0, 0.5,
                                                OracleConfig(mode="grid", points_per_dim=11))
    dense_lo, dense_hi = actual_layer_domains(net, x0, 0.5,
                                              OracleConfig(mode="grid", points_per_dim=21))
    for i in range(net.n_layers):
        assert (dense_lo[i] <= sparse_lo[i]).all()
        assert (dense_hi[i] >= sparse_hi[i]).all()


def test_oracle_inside_propagated_domains():
    net = synthesize("FNN_2x6", seed=7, activation="sigmoid",
                     input_shape=(2,), n_classes=3, gain=2.5)
    x0 = np.array([0.3, 0.2])
    eps = 0.4
    res = compute_domains(net, x0, eps,
                          PropagationConfig(Strategy.DUAL, MonteCarloUnder(300, 1)))
    lo, hi = actual_layer_domains(net, x0, eps,
                                  OracleConfig(mode="grid", points_per_dim=151))
    for i in range(net.n_layers):
        assert (lo[i] >= res.layer_lower[i] - 1e-9).all()
        assert (hi[i] <= res.layer_upper[i] + 1e-9).all()


def test_constant_margin_net_radius_hits_cap():
    net = Network((2,), [DenseLayer(np.zeros((2, 2)), np.array([2.0, 0.0]), "identity")])
    rho = true_robust_radius(net, np.zeros(2), OracleConfig(mode="grid", points_per_dim=21))
    assert rho == 1.0


def test_misclassified_center_gives_zero():
    # argmax flips immediately anywhere around the tie point
    net = Network((2,), [DenseLayer(np.array([[1.0, 0.0], [-1.0, 0.0]]),
                                    np.zeros(2), "identity")])
    x0 = np.array([-0.2, 0.0])
    assert net.predicted_label(x0) == 1
    rho = true_robust_radius(net, x0, OracleConfig(mode="grid", points_per_dim=41),
                             resolution=1e-3)
    assert 0.15 < rho < 0.25  # flips once the ball crosses x1 = 0


def test_exhaustive_margin_matches_forward():
    net = synthesize("FNN_1x4", seed=9, activation="sigmoid",
                     input_shape=(2,), n_classes=3, gain=2.0)
    x0 = np.array([0.1, 0.1])
    label = net.predicted_label(x0)
    m0 = exhaustive_margin(net, x0, 0.0, label, OracleConfig(mode="grid", points_per_dim=3))
    logits, _ = net.forward(x0)
    others = np.delete(logits, label)
    assert abs(m0 - (logits[label] - others.max())) < 1e-12


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(mode="mcmc")
    with pytest.raises(ValueError):
        OracleConfig(mode="grid", points_per_dim=1)
