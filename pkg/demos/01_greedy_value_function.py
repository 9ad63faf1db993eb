"""
Density greedy and its value function
=====================================

Run the greedy on a small modular instance, look at the trace, and
evaluate the piecewise-linear value function V between breakpoints.
"""

# %%
import numpy as np

from msk import Instance, ModularOracle, greedy, greedy_lazy, value_function
from msk.exact import random_coverage

inst = Instance([8.0, 8.0, 1.0], 16.0, ModularOracle([8.0, 8.0, 2.0]))
trace = greedy(inst)
for c in trace.considered:
    print(f"considered {c.element}: gain {c.marginal:g}, density {c.density:g}, kept={c.selected}")

# %%
# V interpolates (used capacity, value) through the greedy prefixes.
V = value_function(trace)
print("breakpoints", V.breakpoints)
print("V(5) =", V(5.0))
print("slopes", V.slopes)  # non-increasing: V is concave

# %%
# The lazy variant re-evaluates only stale heap heads and returns the same trace.
big = random_coverage(40, np.random.default_rng(0))
big.oracle.reset_calls()
plain = greedy(big)
plain_calls = big.oracle.calls
big.oracle.reset_calls()
lazy = greedy_lazy(big)
print("same trace:", plain == lazy, "| calls plain", plain_calls, "lazy", big.oracle.calls)
