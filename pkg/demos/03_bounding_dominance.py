"""
The exponential lower envelope
==============================

Build the bounding function h for the optimum of a random coverage
instance and check that the greedy value function stays above it.
"""

# %%
import numpy as np

from msk import brute_force_opt, build_bounding, build_partition_auto, greedy, value_function, verify_dominance
from msk.exact import random_coverage

inst = random_coverage(11, np.random.default_rng(3))
opt, X = brute_force_opt(inst)
trace = greedy(inst)
part = build_partition_auto(inst, X)
h = build_bounding(inst, part)
print("optimum", sorted(X), "value", round(opt, 6))
print("rates r_j      ", np.round(h.rates, 4))
print("breakpoints D_j", np.round(h.D, 4))

# %%
report = verify_dominance(inst, trace, part)
print(report)

# %%
# Side by side on a coarse grid.
V = value_function(trace)
for u in np.linspace(0, report.W_max, 8):
    print(f"u={u:6.3f}  V={V(u):.4f}  h={h(u):.4f}")
