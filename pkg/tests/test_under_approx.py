import numpy as np
import pytest

from dualbound.network import DenseLayer, Network
from dualbound.oracle import OracleConfig, actual_layer_domains
from dualbound.synth import synthesize
from dualbound.under_approx import gradient_domains, monte_carlo_domains


@pytest.fixture(scope="module")
def small_net():
    return synthesize("FNN_2x6", seed=3, activation="sigmoid",
                      input_shape=(2,), n_classes=2, gain=2.0)


def test_eps_zero_gives_point_domains(small_net):
    x0 = np.array([0.2, -0.1])
    ud = monte_carlo_domains(small_net, x0, 0.0, 50, seed=1)
    _, trace = small_net.forward(x0)
    for i in small_net.hidden_indices:
        assert np.array_equal(ud.lower[i], trace[i].pre_activation)
        assert np.array_equal(ud.upper[i], trace[i].pre_activation)


def test_single_sample_is_center(small_net):
    x0 = np.array([0.2, -0.1])
    ud = monte_carlo_domains(small_net, x0, 0.5, 1, seed=1)
    point = monte_carlo_domains(small_net, x0, 0.0, 1, seed=1)
    for i in small_net.hidden_indices:
        assert np.array_equal(ud.lower[i], point.lower[i])
        assert np.array_equal(ud.upper[i], point.upper[i])


def test_needs_one_sample(small_net):
    with pytest.raises(ValueError):
        monte_carlo_domains(small_net, np.zeros(2), 0.1, 0, seed=1)


def test_witnesses_reproduce_bounds_exactly(small_net):
    x0 = np.array([0.3, -0.4])
    eps = 0.5
    for ud in (monte_carlo_domains(small_net, x0, eps, 400, seed=11),
               gradient_domains(small_net, x0, eps, 0.45)):
        for i in small_net.hidden_indices:
            for r in range(small_net.width(i)):
                _, tr = small_net.forward(ud.witness_lower[i][r])
                assert tr[i].pre_activation[r] == ud.lower[i][r]
                _, tr = small_net.forward(ud.witness_upper[i][r])
                assert tr[i].pre_activation[r] == ud.upper[i][r]
                assert np.abs(ud.witness_lower[i][r] - x0).max() <= eps + 1e-12
                assert np.abs(ud.witness_upper[i][r] - x0).max() <= eps + 1e-12


def test_under_domains_inside_actual(small_net):
    x0 = np.array([0.3, -0.4])
    eps = 0.6
    actual_lo, actual_hi = actual_layer_domains(
        small_net, x0, eps, OracleConfig(mode="grid", points_per_dim=301))
    for ud in (monte_carlo_domains(small_net, x0, eps, 2000, seed=5),
               gradient_domains(small_net, x0, eps, 0.45)):
        for i in small_net.hidden_indices:
            assert (ud.lower[i] >= actual_lo[i] - 1e-9).all()
            assert (ud.upper[i] <= actual_hi[i] + 1e-9).all()


def test_monte_carlo_covers_most_of_actual(small_net):
    # 2-input net: with enough samples the sampled range nearly fills the
    # dense-grid range on every neuron
    x0 = np.array([0.3, -0.4])
    eps = 0.5
    ud = monte_carlo_domains(small_net, x0, eps, 10_000, seed=2)
    actual_lo, actual_hi = actual_layer_domains(
        small_net, x0, eps, OracleConfig(mode="grid", points_per_dim=201))
    for i in small_net.hidden_indices:
        cover = (ud.upper[i] - ud.lower[i]) / (actual_hi[i] - actual_lo[i])
        assert (cover >= 0.95).all()


def test_prefix_monotone_in_n(small_net):
    x0 = np.array([0.1, 0.2])
    eps = 0.4
    prev = monte_carlo_domains(small_net, x0, eps, 10, seed=7)
    for n in (100, 1000):
        cur = monte_carlo_domains(small_net, x0, eps, n, seed=7)
        for i in small_net.hidden_indices:
            assert (cur.lower[i] <= prev.lower[i] + 1e-12).all()
            assert (cur.upper[i] >= prev.upper[i] - 1e-12).all()
        prev = cur


def test_deterministic_given_seed(small_net):
    x0 = np.array([0.1, 0.2])
    a = monte_carlo_domains(small_net, x0, 0.3, 200, seed=9)
    b = monte_carlo_domains(small_net, x0, 0.3, 200, seed=9)
    for i in small_net.hidden_indices:
        assert np.array_equal(a.lower[i], b.lower[i])
        assert np.array_equal(a.upper[i], b.upper[i])
    c = monte_carlo_domains(small_net, x0, 0.3, 200, seed=10)
    assert any(not np.array_equal(a.lower[i], c.lower[i])
               for i in small_net.hidden_indices)


def test_gradient_linear_layer_closed_form():
    rng = np.random.default_rng(8)
    W = rng.standard_normal((4, 3))
    net = Network((3,), [DenseLayer(W, rng.standard_normal(4), "sigmoid"),
                         DenseLayer(rng.standard_normal((2, 4)), np.zeros(2),
                                    "identity")])
    x0 = rng.standard_normal(3)
    eps, a = 0.3, 0.45
    ud = gradient_domains(net, x0, eps, a)
    z0 = W @ x0 + net.layers[0].bias
    reach = a * eps * np.abs(W).sum(axis=1)
    assert np.allclose(ud.lower[0], z0 - reach, atol=1e-12)
    assert np.allclose(ud.upper[0], z0 + reach, atol=1e-12)


def test_gradient_zero_step_is_point(small_net):
    x0 = np.array([0.25, 0.5])
    ud = gradient_domains(small_net, x0, 0.4, 0.0)
    _, trace = small_net.forward(x0)
    for i in small_net.hidden_indices:
        assert np.array_equal(ud.lower[i], trace[i].pre_activation)
        assert np.array_equal(ud.upper[i], trace[i].pre_activation)


def test_gradient_step_fraction_validated(small_net):
    with pytest.raises(ValueError):
        gradient_domains(small_net, np.zeros(2), 0.1, 1.5)


def test_sampling_respects_declared_input_range():
    net = synthesize("FNN_1x4", seed=2, activation="tanh", input_shape=(2,),
                     n_classes=2, input_range=(0.0, 1.0))
    x0 = np.array([0.05, 0.95])
    for ud in (monte_carlo_domains(net, x0, 0.5, 500, seed=3),
               gradient_domains(net, x0, 0.5, 1.0)):
        for i in net.hidden_indices:
            for r in range(net.width(i)):
                assert (ud.witness_lower[i][r] >= 0.0).all()
                assert (ud.witness_upper[i][r] <= 1.0).all()


def test_wider_ball_widens_domains(small_net):
    x0 = np.array([0.0, 0.0])
    narrow = monte_carlo_domains(small_net, x0, 0.1, 500, seed=4)
    wide = monte_carlo_domains(small_net, x0, 0.5, 500, seed=4)
    total_narrow = sum(float(np.sum(narrow.upper[i] - narrow.lower[i]))
                       for i in small_net.hidden_indices)
    total_wide = sum(float(np.sum(wide.upper[i] - wide.lower[i]))
                     for i in small_net.hidden_indices)
    assert total_wide > total_narrow
