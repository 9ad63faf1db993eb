"""Coverage instance on which Greedy+Singleton stays below 0.42945 of optimum.

Three disjoint intervals ``X``, ``Y``, ``Z`` of total length 1 and total
weight 1 form the optimum.  Many short decoy intervals are added: a first
batch tiling the left part of ``Z`` and a second batch, each piece spread
over ``X``, ``Y`` and the rest of ``Z`` in proportion to their weights.
Decoy weights are tuned so that every decoy has exactly the density of
the best competing element when it is picked (ties go to decoys by id
order), and the decoys plus ``Z`` use just enough capacity to lock out
``X`` and ``Y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algorithms import greedy_plus_singleton
from .greedy import GreedyTrace, greedy_lazy
from .intervals import IntervalSet
from .oracle import FEASIBILITY_RTOL, CoverageOracle, Instance

DENSITY_CHECK_TOL = 1e-9
#: smallest epsilon for which the full capacity lock-out validates is ~8.9e-6
DEFAULT_EPSILON = 5e-6
STRUCTURE_EPSILON = 1e-3


class ConstructionInfeasibleError(ValueError):
    """A run-defining inequality fails for the requested epsilon."""

    def __init__(self, inequality: str, detail: str):
        super().__init__(f"{inequality}: {detail} (shrink epsilon)")
        self.inequality = inequality


@dataclass(frozen=True)
class AdversarialParams:
    f_X: float = 0.42943
    f_Y: float = 0.42943
    w_X: float = 0.4584
    w_Y: float = 0.4584
    W: float = 1.0
    rho: float = 0.62233
    beta: float = 0.42945

    @property
    def f_Z(self) -> float:
        return 1.0 - self.f_X - self.f_Y

    @property
    def w_Z(self) -> float:
        return self.W - self.w_X - self.w_Y

    @property
    def density_X(self) -> float:
        """``mu(X) / w(X)``, the density shared by ``X``, ``Y`` and the rest of ``Z``."""
        return self.f_X / self.w_X

    @property
    def first_batch_length(self) -> float:
        """Total length of the first decoy batch, ``mu(Z) - (mu(X)/w(X)) w(Z)``."""
        return self.f_Z - self.density_X * self.w_Z

    @property
    def target_value(self) -> float:
        return 1.0 - 2.0 * self.rho * self.w_X

    @property
    def first_batch_weight_limit(self) -> float:
        return self.w_Z * math.log(self.f_Z * self.w_X / (self.w_Z * self.f_X))

    @property
    def second_batch_weight_limit(self) -> float:
        return math.log(self.f_X / (self.rho * self.w_X))


@dataclass
class AdversarialInstance:
    instance: Instance
    params: AdversarialParams
    epsilon: float
    epsilon_eff: float
    k1: int
    k2: int
    ragged_length: float
    structure_only: bool = False
    checks: dict = field(default_factory=dict)

    @property
    def z_id(self) -> int:
        return self.k2

    @property
    def x_id(self) -> int:
        return self.k2 + 1

    @property
    def y_id(self) -> int:
        return self.k2 + 2

    @property
    def predicted_order(self) -> list[int]:
        return list(range(self.k2)) + [self.z_id]

    @property
    def predicted_densities(self) -> np.ndarray:
        return predicted_densities(self.params, self.epsilon_eff, self.k1, self.k2)

    @property
    def first_batch_weight(self) -> float:
        return math.fsum(self.instance.weights[: self.k1])

    @property
    def second_batch_weight(self) -> float:
        return math.fsum(self.instance.weights[self.k1: self.k2])

    def metadata(self) -> dict:
        return {"adversarial": {
            "epsilon": self.epsilon, "epsilon_eff": self.epsilon_eff, "k1": self.k1, "k2": self.k2,
            "ragged_length": self.ragged_length, "structure_only": self.structure_only,
            "params": {k: getattr(self.params, k) for k in ("f_X", "f_Y", "w_X", "w_Y", "W", "rho", "beta")},
        }}

    @classmethod
    def from_metadata(cls, instance: Instance, meta: dict) -> "AdversarialInstance":
        adv = meta["adversarial"]
        return cls(instance, AdversarialParams(**adv["params"]), adv["epsilon"], adv["epsilon_eff"],
                   int(adv["k1"]), int(adv["k2"]), adv["ragged_length"], bool(adv["structure_only"]))


def predicted_densities(params: AdversarialParams, eps: float, k1: int, k2: int) -> np.ndarray:
    """Density of each greedy pick: first batch, second batch, then ``Z``."""
    j = np.arange(k1)
    first = (params.f_Z - eps * j) / params.w_Z
    t = np.arange(k2 - k1)
    second = params.density_X - eps * t
    final = params.density_X - eps * (k2 - k1)  # equals rho
    return np.concatenate((first, second, [final]))


def _batch_counts(params: AdversarialParams, epsilon: float) -> tuple[float, int, int, float]:
    span = params.density_X - params.rho
    m = int(round(span / epsilon))
    if m < 1:
        raise ConstructionInfeasibleError("k2 - k1 >= 1", f"epsilon {epsilon} leaves no second batch")
    eps = span / m
    L1 = params.first_batch_length
    k1 = max(1, math.ceil(L1 / eps - 1e-9))
    ragged = L1 - (k1 - 1) * eps
    return eps, k1, k1 + m, ragged


def gen_adversarial(epsilon: float = DEFAULT_EPSILON, structure_only: bool = False,
                    params: AdversarialParams = AdversarialParams()) -> AdversarialInstance:
    """Build the decoy instance and validate the inequalities its greedy run needs.

    Element ids: decoys ``0..k2-1`` in pick order, then ``Z``, ``X``, ``Y``.
    ``structure_only`` skips the capacity lock-out check so coarse
    epsilons can still exercise the pick order and density formulas.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    p = params
    eps, k1, k2, ragged = _batch_counts(p, epsilon)
    m = k2 - k1
    z0 = 2.0
    split = z0 + p.first_batch_length

    sets: list[IntervalSet] = []
    weights: list[float] = []
    # first batch: consecutive pieces of Z, the last one shortened
    for j in range(k1):
        a = z0 + j * eps
        b = z0 + (j + 1) * eps if j < k1 - 1 else split
        piece = IntervalSet([(a, b)])
        sets.append(piece)
        weights.append(piece.measure * p.w_Z / (p.f_Z - eps * j))
    # second batch: matching slices of X, Y and Z beyond the first batch
    cX, cY, cZ = eps * p.w_X, eps * p.w_Y, eps * p.w_Z
    for t in range(m):
        piece = IntervalSet([(t * cX, (t + 1) * cX),
                             (1.0 + t * cY, 1.0 + (t + 1) * cY),
                             (split + t * cZ, split + (t + 1) * cZ)])
        sets.append(piece)
        weights.append(piece.measure / (p.density_X - eps * t))
    sets += [IntervalSet([(z0, z0 + p.f_Z)]), IntervalSet([(0.0, p.f_X)]), IntervalSet([(1.0, 1.0 + p.f_Y)])]
    weights += [p.w_Z, p.w_X, p.w_Y]

    inst = AdversarialInstance(Instance(weights, p.W, CoverageOracle(sets)), p, epsilon, eps,
                               k1, k2, ragged, structure_only)
    inst.checks = validate(inst)
    for name, (ok, detail) in inst.checks.items():
        if not ok and not (structure_only and name == "lockout"):
            raise ConstructionInfeasibleError(name, detail)
    return inst


def validate(inst: AdversarialInstance) -> dict[str, tuple[bool, str]]:
    """Numerical checks replacing the existence argument for epsilon."""
    p = inst.params
    w = inst.instance.weights
    k1, k2 = inst.k1, inst.k2
    picked = math.fsum(w[:k2]) + p.w_Z
    checks: dict[str, tuple[bool, str]] = {}
    cap = p.W * (1 + FEASIBILITY_RTOL)
    checks["fits"] = (picked <= cap, f"w(decoys) + w(Z) = {picked!r} vs W = {p.W!r}")
    lock = min(picked + p.w_X, picked + p.w_Y)
    checks["lockout"] = (lock > cap, f"w(decoys) + w(Z) = {picked!r} vs 1 - w(X) = {p.W - p.w_X!r}")
    d = inst.predicted_densities
    first, second = d[:k1], d[k1:k2]
    checks["first_batch_order"] = (
        bool(np.all(np.diff(first) < 0) and first[-1] >= p.density_X),
        f"first-batch densities must fall strictly and stay >= {p.density_X!r}; last = {float(first[-1])!r}")
    checks["second_batch_order"] = (
        bool(second.size == 0 or (np.all(np.diff(second) < 0) and second[0] <= p.density_X
                                 and second[-1] > p.rho)),
        "second-batch densities must fall strictly within (rho, mu(X)/w(X)]")
    checks["final_density"] = (bool(abs(d[-1] - p.rho) <= DENSITY_CHECK_TOL),
                               f"density of Z after the decoys is {float(d[-1])!r}, expected rho = {p.rho!r}")
    top = max(p.f_X, p.f_Y, p.f_Z)
    checks["singletons"] = (top < p.beta, f"largest singleton value {top!r} vs beta = {p.beta!r}")
    return checks


@dataclass
class AdversarialReport:
    trace_match: bool
    gps_value: float
    opt_value: float
    ratio: float
    target_value: float
    full_value: float
    density_error: float
    densities_ok: bool
    xy_rejected: bool
    first_divergence: dict | None = None
    n: int = 0
    structure_only: bool = False

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in (
            "trace_match", "gps_value", "opt_value", "ratio", "target_value", "full_value",
            "density_error", "densities_ok", "xy_rejected", "first_divergence", "n", "structure_only")}


def _checkpoints(k1: int, k2: int, budget: int = 400) -> list[int]:
    if k2 <= budget:
        return list(range(k2 + 1))
    pts = set(np.linspace(0, k2, budget).astype(int).tolist())
    pts |= {0, 1, k1 - 1, k1, k1 + 1, k2 - 1, k2}
    return sorted(x for x in pts if 0 <= x <= k2)


def competitor_density_error(inst: AdversarialInstance) -> float:
    """Largest deviation of the densities of ``X``, ``Y``, ``Z`` from their closed forms
    after ``j`` decoy picks, over a set of checkpoints ``j``."""
    p, eps, k1, k2 = inst.params, inst.epsilon_eff, inst.k1, inst.k2
    oracle = inst.instance.oracle
    w = inst.instance.weights
    prefix = oracle.prefix()
    worst = 0.0
    done = 0
    for j in _checkpoints(k1, k2):
        while done < j:
            prefix.add(done)
            done += 1
        if j < k1:
            want_xy, want_z = p.density_X, (p.f_Z - eps * j) / p.w_Z
        else:
            want_xy = want_z = p.density_X - eps * (j - k1)
        for e, want in ((inst.x_id, want_xy), (inst.y_id, want_xy), (inst.z_id, want_z)):
            worst = max(worst, abs(prefix.gain(e) / w[e] - want))
    return worst


def verify_adversarial(inst: AdversarialInstance, trace: GreedyTrace | None = None) -> AdversarialReport:
    """Run the lazy greedy and Greedy+Singleton and compare with the predicted run."""
    instance = inst.instance
    f = instance.oracle
    if trace is None:
        trace = greedy_lazy(instance)
    expected = inst.predicted_order
    got = trace.order
    head = got[: len(expected)]
    divergence = None
    for i, e in enumerate(expected):
        if i >= len(got) or got[i] != e:
            divergence = {"index": i, "expected": e, "actual": got[i] if i < len(got) else None}
            break
    status = {c.element: c.selected for c in trace.considered}
    xy_rejected = status.get(inst.x_id) is False and status.get(inst.y_id) is False
    if inst.structure_only:
        trace_match = head == expected
    else:
        trace_match = got == expected and xy_rejected
        if divergence is None and got != expected:
            divergence = {"index": len(expected), "expected": None, "actual": got[len(expected)]}

    picked = [c for c in trace.considered if c.selected][: len(expected)]
    dens = np.array([c.density for c in picked])
    want = inst.predicted_densities[: dens.size]
    pick_err = float(np.max(np.abs(dens - want))) if dens.size else 0.0
    density_error = float(max(pick_err, competitor_density_error(inst)))

    gps = greedy_plus_singleton(instance, trace=trace)
    opt = f.evaluate((inst.x_id, inst.y_id, inst.z_id))
    full = f.evaluate(range(instance.n))
    return AdversarialReport(
        trace_match=trace_match, gps_value=gps.value, opt_value=opt, ratio=gps.value / opt,
        target_value=inst.params.target_value, full_value=full, density_error=density_error,
        densities_ok=bool(density_error <= DENSITY_CHECK_TOL), xy_rejected=xy_rejected,
        first_divergence=divergence, n=instance.n, structure_only=inst.structure_only)
