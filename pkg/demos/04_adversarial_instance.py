"""
A coverage instance that defeats Greedy+Singleton
=================================================

Decoy intervals with carefully tuned weights are picked ahead of the
three optimal pieces X, Y, Z; once Z is added there is no room for X or
Y, and no singleton is worth more than 0.42943.
"""

# %%
import time

from msk import gen_adversarial, verify_adversarial

coarse = gen_adversarial(1e-3, structure_only=True)
rep = verify_adversarial(coarse)
print(f"coarse: n={coarse.instance.n}, k1={coarse.k1}, k2={coarse.k2}, order ok={rep.trace_match}, "
      f"density error {rep.density_error:.1e}")
print("lock-out check at this epsilon:", coarse.checks["lockout"])

# %%
# The lock-out margin is a few 1e-6, so the full run needs a fine epsilon.
t0 = time.perf_counter()
fine = gen_adversarial(5e-6)
rep = verify_adversarial(fine)
print(f"fine: n={fine.instance.n}, {time.perf_counter() - t0:.1f}s")
print(f"Greedy+Singleton {rep.gps_value:.9f}, OPT {rep.opt_value:.9f}, ratio {rep.ratio:.9f}")
print("target 1 - 2*rho*w(X) =", fine.params.target_value)
