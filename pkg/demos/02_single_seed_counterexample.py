"""
Why one seed element is not enough
==================================

Three modular elements: two heavy ones of weight N that exactly fill the
knapsack together, and a light one with the best density.  Seeding with a
single element still lets the light element in first, blocking the pair.
"""

# %%
import math

from msk import brute_force_opt, enum_greedy
from msk.exact import bad_example

for N in (2, 4, 8, 16):
    inst = bad_example(N)
    opt, opt_set = brute_force_opt(inst)
    one, two = enum_greedy(inst, 1), enum_greedy(inst, 2)
    print(f"N={N:>2}: OPT {opt:g} {sorted(opt_set)} | seeds<=1: {one.value:g} "
          f"(ratio {one.value / opt:.4f}) | seeds<=2: {two.value:g} via seed {two.best_seed}")

# %%
print("1 - 1/e =", 1 - math.exp(-1))
# With N=8 the single-seed ratio 0.625 falls below 1 - 1/e; pairs recover OPT.
