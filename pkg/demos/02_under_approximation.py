"""Underestimated domains versus the true reachable ranges.

On a 2-input network the brute-force oracle can enumerate each neuron's
actual pre-activation range, so both under-approximation algorithms can be
compared against the truth and against the propagated over-domains.

    python demos/02_under_approximation.py
"""
import numpy as np

from dualbound import (MonteCarloUnder, OracleConfig, PropagationConfig, Strategy,
                       actual_layer_domains, compute_domains, gradient_domains,
                       monte_carlo_domains, synthesize)

net = synthesize("FNN_2x6", seed=7, activation="sigmoid",
                 input_shape=(2,), n_classes=3, gain=2.5)
x0 = np.array([0.3, -0.2])
eps = 0.4

mc = monte_carlo_domains(net, x0, eps, n=1000, seed=0)
gd = gradient_domains(net, x0, eps, step_fraction=0.45)
actual_lo, actual_hi = actual_layer_domains(
    net, x0, eps, OracleConfig(mode="grid", points_per_dim=301))
over = compute_domains(net, x0, eps,
                       PropagationConfig(Strategy.DUAL, MonteCarloUnder(1000, 0)))

print(f"net FNN_2x6 seed 7, x0 {x0.tolist()}, eps {eps}")
print(f"{'neuron':<10}{'over-domain':>22}{'actual':>22}"
      f"{'monte carlo':>22}{'gradient':>22}")
for i in net.hidden_indices:
    for r in range(net.width(i)):
        def fmt(lo, hi):
            return f"[{lo:7.3f},{hi:7.3f}]"
        print(f"({i},{r})    "
              f"{fmt(over.layer_lower[i][r], over.layer_upper[i][r]):>22}"
              f"{fmt(actual_lo[i][r], actual_hi[i][r]):>22}"
              f"{fmt(mc.lower[i][r], mc.upper[i][r]):>22}"
              f"{fmt(gd.lower[i][r], gd.upper[i][r]):>22}")

for name, ud in (("monte carlo", mc), ("gradient", gd)):
    cover = np.mean([
        (ud.upper[i] - ud.lower[i]).sum() / max((actual_hi[i] - actual_lo[i]).sum(), 1e-12)
        for i in net.hidden_indices])
    print(f"{name}: mean fraction of the actual width recovered = {cover:.1%}")

# every reported bound is attained by a concrete input (its witness)
_, trace = net.forward(mc.witness_lower[1][0])
assert trace[1].pre_activation[0] == mc.lower[1][0]
print("witness check: re-evaluating a witness reproduces its bound exactly")
