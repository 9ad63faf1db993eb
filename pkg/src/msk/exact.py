"""Exhaustive optimum, random instance families and approximation-ratio sweeps."""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .algorithms import run_algorithm
from .intervals import IntervalSet
from .oracle import (FEASIBILITY_RTOL, CoverageOracle, Instance, ModularOracle,
                     SizeLimitError, _membership_chunks, mask_to_ids)

BRUTE_FORCE_MAX_N = 22
TIE_RTOL = 1e-12


def brute_force_opt(instance: Instance) -> tuple[float, frozenset[int]]:
    """Best feasible subset by full enumeration.

    Among subsets within a relative ``1e-12`` of the maximum, the
    lexicographically first sorted id tuple is returned.
    """
    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise SizeLimitError(f"brute force supports n <= {BRUTE_FORCE_MAX_N}, got {n}")
    values = instance.oracle.all_subset_values()
    weights = np.empty(1 << n)
    for lo, hi, member in _membership_chunks(n):
        weights[lo:hi] = member @ instance.weights
    feasible = weights <= instance.capacity * (1 + FEASIBILITY_RTOL)
    cand = np.where(feasible, values, -np.inf)
    best = float(np.max(cand))
    ties = np.flatnonzero(cand >= best - TIE_RTOL * max(1.0, abs(best)))
    S = min(mask_to_ids(int(m)) for m in ties)
    return best, frozenset(S)


# -- instance families -----------------------------------------------------

def _capacity(rng: np.random.Generator, weights: np.ndarray) -> float:
    total = float(weights.sum())
    return float(rng.uniform(0.3 * total, 0.9 * total))


def _weights(rng: np.random.Generator, n: int) -> np.ndarray:
    return 1.0 - rng.random(n)  # uniform on (0, 1]


def random_coverage(n: int, rng: np.random.Generator) -> Instance:
    """Each element covers 1-3 random subintervals of [0, 1)."""
    sets = []
    for _ in range(n):
        pieces = []
        for _ in range(int(rng.integers(1, 4))):
            a, b = np.sort(rng.random(2))
            if b > a:
                pieces.append((a, b))
        if not pieces:
            a = float(rng.random()) * 0.5
            pieces.append((a, a + 0.25))
        sets.append(IntervalSet.merged(pieces))
    w = _weights(rng, n)
    return Instance(w, _capacity(rng, w) if n else 1.0, CoverageOracle(sets))


def random_modular(n: int, rng: np.random.Generator) -> Instance:
    w = _weights(rng, n)
    return Instance(w, _capacity(rng, w) if n else 1.0, ModularOracle(rng.random(n)))


def bad_example(N: float) -> Instance:
    """Three-element modular instance on which single-seed enumeration falls short."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return Instance([N, N, 1.0], 2.0 * N, ModularOracle([N, N, 2.0]))


FAMILIES: dict[str, Callable[[int, np.random.Generator], Instance]] = {
    "coverage": random_coverage,
    "modular": random_modular,
    "bad-example": lambda n, rng: bad_example(8),
}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


# -- sweeps ----------------------------------------------------------------

@dataclass(frozen=True)
class RatioRecord:
    trial: int
    n: int
    alg: str
    alg_value: float
    opt_value: float
    ratio: float
    oracle_calls: int
    family: str = ""
    seed: int = 0


CSV_COLUMNS = ("trial", "n", "alg", "alg_value", "opt_value", "ratio", "oracle_calls")


def _ratio(alg_value: float, opt_value: float) -> float:
    return alg_value / opt_value if opt_value > 0 else 1.0


def _run_trial(family: str, n: int, algorithms: Sequence[str], seed: int, trial: int) -> list[RatioRecord]:
    inst = FAMILIES[family](n, trial_rng(seed, trial))
    opt, _ = brute_force_opt(inst)
    out = []
    for name in algorithms:
        res = run_algorithm(name, inst)
        out.append(RatioRecord(trial, inst.n, name, res.value, opt, _ratio(res.value, opt),
                               res.oracle_calls, family, seed))
    return out


def ratio_sweep(family: str, algorithms: Sequence[str], trials: int, seed: int, n: int = 12,
                workers: int = 1) -> list[RatioRecord]:
    """Run each algorithm and brute force on ``trials`` random instances.

    Trial ``t`` draws from ``default_rng([seed, t])``, so records are
    reproducible and independent of ``workers``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if n > BRUTE_FORCE_MAX_N:
        raise SizeLimitError(f"sweeps need n <= {BRUTE_FORCE_MAX_N} for brute force")
    job = lambda t: _run_trial(family, n, algorithms, seed, t)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(job, range(trials)))
    else:
        batches = [job(t) for t in range(trials)]
    return [r for batch in batches for r in batch]


def write_csv(records: Sequence[RatioRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            row = asdict(r)
            writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in CSV_COLUMNS])
