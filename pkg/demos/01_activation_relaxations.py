"""Linear bounds for one activation, strategy by strategy.

Builds every relaxation strategy on the same interval, checks each one on a
dense grid, prints the bound lines and gap areas, and draws the picture.
Run from the repository root:

    python demos/01_activation_relaxations.py
"""
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dualbound import (SIGMOID, DomainPair, Strategy, check_soundness_grid,
                       relax_baseline, relax_dual)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# a wide overestimated interval with a narrower, asymmetric underestimated
# one, the situation bound propagation creates in deeper layers; the lower
# bound anchors its tangent at the underestimated minimum, the upper
# candidate is unsound there and falls back to the over-domain construction
dom = DomainPair(l_over=-3.0, u_over=3.0, l_under=-2.2, u_under=0.5)

relaxations = {"dual": relax_dual(SIGMOID, dom)}
for strategy in (Strategy.ENDPOINT_TANGENT, Strategy.MINIMAL_AREA,
                 Strategy.PARALLEL_LINE, Strategy.MIDPOINT_TANGENT):
    relaxations[strategy.value] = relax_baseline(strategy, SIGMOID,
                                                 dom.l_over, dom.u_over)

print(f"sigmoid on [{dom.l_over}, {dom.u_over}], "
      f"under-domain [{dom.l_under}, {dom.u_under}]")
print(f"{'strategy':<10}{'h_L':>24}{'h_U':>24}{'gap area':>10}{'worst':>12}")
for name, r in relaxations.items():
    worst = check_soundness_grid(r, SIGMOID, dom.l_over, dom.u_over, 10_000)
    print(f"{name:<10}{r.alpha_L:>11.4f}x{r.beta_L:>+9.4f}"
          f"{r.alpha_U:>11.4f}x{r.beta_U:>+9.4f}"
          f"{r.gap_area(dom.l_over, dom.u_over):>10.4f}{worst:>12.2e}")

xs = np.linspace(dom.l_over, dom.u_over, 400)
fig, axes = plt.subplots(1, len(relaxations), figsize=(4 * len(relaxations), 3.2),
                         sharey=True)
for ax, (name, r) in zip(axes, relaxations.items()):
    ax.plot(xs, SIGMOID.value(xs), "k", lw=1.5)
    ax.plot(xs, r.lower(xs), "C0")
    ax.plot(xs, r.upper(xs), "C3")
    ax.axvspan(dom.l_under, dom.u_under, color="0.9")
    ax.set_title(name)
    ax.set_xlabel("pre-activation")
fig.tight_layout()
fig.savefig(OUT / "relaxations.png", dpi=120)
print(f"\nwrote {OUT / 'relaxations.png'}")
