import numpy as np
import pytest

from dualbound.network import DenseLayer, Network
from dualbound.oracle import OracleConfig, true_robust_radius
from dualbound.propagation import MonteCarloUnder, PropagationConfig
from dualbound.relaxation import Strategy
from dualbound.synth import synthesize
from dualbound.verifier import (certified_lower_bound, compare_strategies,
                                improvement_pct, overestimation_ratio,
                                robustness_ratio, verify_robust)

PARALLEL = PropagationConfig(Strategy.PARALLEL_LINE, None)
DUAL_MC = PropagationConfig(Strategy.DUAL, MonteCarloUnder(n=300, seed=0))


def constant_output_net(biases):
    return Network((2,), [DenseLayer(np.zeros((3, 2)), np.zeros(3), "sigmoid"),
                          DenseLayer(np.zeros((len(biases), 3)),
                                     np.array(biases, dtype=float), "identity")])


class TestVerifyRobust:
    def test_eps_zero_with_strict_margins(self):
        net = synthesize("FNN_2x5", seed=2, activation="sigmoid",
                         input_shape=(3,), n_classes=3, gain=2.0)
        out = verify_robust(net, np.array([0.1, 0.2, 0.3]), 0.0, PARALLEL)
        assert out.robust
        assert all(v > 0 for v in out.margins.values())

    def test_constant_output_net_robust_at_any_eps(self):
        net = constant_output_net([3.0, 1.0, -1.0])
        for eps in (0.0, 0.5, 1.0, 10.0):
            out = verify_robust(net, np.zeros(2), eps, PARALLEL)
            assert out.robust
            assert out.label == 0
            assert abs(out.margins[1] - 2.0) < 1e-9

    def test_rejects_negative_eps(self):
        net = constant_output_net([1.0, 0.0])
        with pytest.raises(ValueError):
            verify_robust(net, np.zeros(2), -0.1, PARALLEL)

    def test_robust_below_oracle_radius(self):
        net = synthesize("FNN_2x6", seed=21, activation="tanh",
                         input_shape=(2,), n_classes=3, gain=3.0)
        x0 = np.array([0.3, -0.2])
        rho = true_robust_radius(net, x0, OracleConfig(mode="grid", points_per_dim=151),
                                 resolution=1e-3)
        if rho > 0.01:
            assert verify_robust(net, x0, 0.5 * rho, DUAL_MC).status in ("robust", "unknown")
            # soundness: a robust verdict at eps implies no counterexample there
            out = verify_robust(net, x0, 0.5 * rho, DUAL_MC)
            if out.robust:
                assert 0.5 * rho <= rho


class TestCertifiedLowerBound:
    def test_always_robust_reaches_cap(self):
        net = constant_output_net([2.0, 0.0])
        cb = certified_lower_bound(net, np.zeros(2), PARALLEL)
        assert cb.epsilon == 1.0
        assert cb.iterations == 16
        assert np.isinf(cb.first_failed)

    def test_never_robust_returns_zero(self):
        # tie at the top: margins are never strictly positive
        net = constant_output_net([1.0, 1.0])
        cb = certified_lower_bound(net, np.zeros(2), PARALLEL)
        assert cb.epsilon == 0.0
        assert cb.first_failed <= 0.05

    def test_bracket_invariants_and_monotone_growth(self):
        net = synthesize("FNN_2x6", seed=33, activation="sigmoid",
                         input_shape=(4,), n_classes=3, gain=4.0)
        x0 = np.array([0.2, -0.1, 0.3, 0.05])
        cb = certified_lower_bound(net, x0, PARALLEL)
        assert cb.last_verified == cb.epsilon
        assert cb.first_failed > cb.epsilon
        if cb.epsilon > 0:
            assert verify_robust(net, x0, cb.epsilon, PARALLEL).robust

    def test_certified_below_oracle_radius(self):
        ocfg = OracleConfig(mode="grid", points_per_dim=151)
        for seed in range(3):
            net = synthesize("FNN_2x5", seed=seed, activation="arctan",
                             input_shape=(2,), n_classes=3, gain=3.0)
            x0 = np.random.default_rng(seed).uniform(-0.5, 0.5, 2)
            rho = true_robust_radius(net, x0, ocfg, resolution=1e-3)
            cb = certified_lower_bound(net, x0, DUAL_MC)
            assert cb.epsilon <= rho + 1e-9


class TestRobustnessRatio:
    def test_perfect_dataset_at_eps_zero(self):
        net = constant_output_net([2.0, 0.0])
        data = [(np.zeros(2), 0), (np.ones(2), 0)]
        assert robustness_ratio(net, data, 0.0, PARALLEL) == 1.0

    def test_misclassified_counts_against(self):
        net = constant_output_net([2.0, 0.0])
        assert robustness_ratio(net, [(np.zeros(2), 1)], 0.0, PARALLEL) == 0.0

    def test_empty_dataset_rejected(self):
        net = constant_output_net([2.0, 0.0])
        with pytest.raises(ValueError):
            robustness_ratio(net, [], 0.1, PARALLEL)

    def test_nonincreasing_in_eps(self):
        net = synthesize("FNN_2x8", seed=44, activation="sigmoid",
                         input_shape=(4,), n_classes=3, gain=4.0)
        rng = np.random.default_rng(3)
        data = []
        for _ in range(20):
            x = rng.uniform(-0.6, 0.6, 4)
            data.append((x, net.predicted_label(x)))
        ratios = [robustness_ratio(net, data, eps, PARALLEL)
                  for eps in (0.0, 0.05, 0.1, 0.2, 0.4)]
        assert all(a >= b for a, b in zip(ratios, ratios[1:]))
        assert ratios[0] == 1.0


class TestOverestimationRatio:
    def test_published_interval_pair(self):
        # the worked overestimation example: [0.039, 0.495] vs [0.127, 0.392]
        r = overestimation_ratio(0.495 - 0.039, 0.392 - 0.127)
        assert round(r, 4) == 0.7208

    def test_equal_spans(self):
        assert overestimation_ratio(0.5, 0.5) == 0.0

    def test_double_span(self):
        assert overestimation_ratio(1.0, 0.5) == 1.0

    def test_rejects_nonpositive_actual(self):
        with pytest.raises(ValueError):
            overestimation_ratio(1.0, 0.0)


class TestImprovementArithmetic:
    def test_published_bound_pair(self):
        assert round(improvement_pct(0.00633, 0.00575), 2) == 10.09

    def test_zero_baseline_undefined(self):
        assert improvement_pct(0.5, 0.0) is None


class TestCompareStrategies:
    def test_identical_configs_zero_improvement(self):
        net = synthesize("FNN_1x4", seed=3, activation="sigmoid",
                         input_shape=(2,), n_classes=2, gain=2.0)
        inputs = [np.array([0.1, 0.2]), np.array([-0.3, 0.4])]
        table = compare_strategies(net, inputs, [PARALLEL, PARALLEL])
        assert table.rows[0].mean_improvement == 0.0
        assert table.rows[0].bounds == table.rows[1].bounds

    def test_needs_two_configs(self):
        net = synthesize("FNN_1x4", seed=3, activation="sigmoid",
                         input_shape=(2,), n_classes=2)
        with pytest.raises(ValueError):
            compare_strategies(net, [np.zeros(2)], [PARALLEL])

    def test_format_renders_table(self):
        net = synthesize("FNN_1x4", seed=3, activation="sigmoid",
                         input_shape=(2,), n_classes=2, gain=2.0)
        table = compare_strategies(net, [np.array([0.1, 0.2])], [DUAL_MC, PARALLEL])
        text = table.format()
        assert "dual" in text and "parallel" in text
