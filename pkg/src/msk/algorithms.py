"""Seeded greedy enumeration and Greedy+Singleton, with oracle-call accounting."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .greedy import GreedyTrace, greedy, greedy_lazy
from .oracle import Instance

MAX_KAPPA = 3


@dataclass
class AlgorithmResult:
    solution: frozenset[int]
    value: float
    oracle_calls: int
    best_seed: object
    trace: GreedyTrace | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        seed = self.best_seed
        if isinstance(seed, (tuple, frozenset)):
            seed = sorted(seed)
        out = {"solution": sorted(self.solution), "value": self.value,
               "oracle_calls": self.oracle_calls, "best_seed": seed}
        if self.trace is not None:
            out["trace"] = self.trace.to_json()
        return out


def default_workers() -> int:
    env = os.environ.get("MSK_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def enum_seeds(n: int, kappa: int) -> list[tuple[int, ...]]:
    """All id tuples of size at most ``kappa`` in lexicographic order."""
    seeds = [G for size in range(kappa + 1) for G in combinations(range(n), size)]
    seeds.sort()
    return seeds


def _extend(instance: Instance, G: tuple[int, ...]) -> tuple[float, frozenset[int]]:
    residual = instance.contract(G)
    A = greedy(residual).final_set
    S = A | frozenset(G)
    return instance.oracle.evaluate(S), S


def enum_greedy(instance: Instance, kappa: int, workers: int = 1) -> AlgorithmResult:
    """Best of ``G + Greedy(E, f_G, w, W - w(G))`` over feasible ``|G| <= kappa``.

    Seeds heavier than the capacity are skipped.  Ties keep the
    lexicographically first seed; the parallel path reduces in the same
    order, so results do not depend on ``workers``.
    """
    if not isinstance(kappa, (int, np.integer)) or not 0 <= kappa <= MAX_KAPPA:
        raise ValueError(f"kappa must be an integer in 0..{MAX_KAPPA}, got {kappa!r}")
    f = instance.oracle
    start = f.calls
    seeds = [G for G in enum_seeds(instance.n, int(kappa)) if instance.feasible(G)]
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda G: _extend(instance, G), seeds))
    else:
        outcomes = [_extend(instance, G) for G in seeds]
    best_value, best_set, best_seed = None, frozenset(), ()
    for G, (value, S) in zip(seeds, outcomes):
        if best_value is None or value > best_value:
            best_value, best_set, best_seed = value, S, G
    value = f.evaluate(best_set)
    return AlgorithmResult(best_set, value, f.calls - start, tuple(best_seed))


def best_singleton(instance: Instance) -> tuple[int | None, float]:
    f = instance.oracle
    best_e, best_v = None, None
    for e in range(instance.n):
        if not instance.fits(instance.weights[e]):
            continue
        v = f.evaluate((e,))
        if best_v is None or v > best_v:
            best_e, best_v = e, v
    return best_e, best_v


def greedy_plus_singleton(instance: Instance, lazy: bool = False,
                          trace: GreedyTrace | None = None) -> AlgorithmResult:
    """Better of the greedy solution and the best feasible singleton.

    ``lazy`` switches to the lazy greedy (needed for large instances); a
    precomputed ``trace`` of the same instance may be passed instead.
    """
    f = instance.oracle
    start = f.calls
    if trace is None:
        trace = greedy_lazy(instance) if lazy else greedy(instance)
    A = trace.final_set
    fA = f.evaluate(A)
    e, fe = best_singleton(instance)
    if e is None or fA >= fe:
        solution, seed = A, "greedy"
    else:
        solution, seed = frozenset((e,)), ("singleton", e)
    value = f.evaluate(solution)
    return AlgorithmResult(solution, value, f.calls - start, seed, trace)


def run_greedy(instance: Instance) -> AlgorithmResult:
    f = instance.oracle
    start = f.calls
    trace = greedy(instance)
    value = f.evaluate(trace.final_set)
    return AlgorithmResult(trace.final_set, value, f.calls - start, "greedy", trace)


ALGORITHMS: dict[str, Callable[[Instance], AlgorithmResult]] = {
    "greedy": run_greedy,
    "enum0": lambda inst: enum_greedy(inst, 0),
    "enum1": lambda inst: enum_greedy(inst, 1),
    "enum2": lambda inst: enum_greedy(inst, 2),
    "enum3": lambda inst: enum_greedy(inst, 3),
    "gps": greedy_plus_singleton,
}


def run_algorithm(name: str, instance: Instance) -> AlgorithmResult:
    try:
        alg = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    return alg(instance)


def count_complexity(family: Callable[[int], Instance], kappa: int,
                     ns: Sequence[int] = (10, 15, 20, 25)) -> list[tuple[int, int]]:
    """Measured ``enum_greedy`` oracle calls for each ground-set size."""
    table = []
    for n in ns:
        inst = family(n)
        table.append((n, enum_greedy(inst, kappa).oracle_calls))
    return table


def loglog_slope(table: Iterable[tuple[int, int]]) -> float:
    """Least-squares slope of ``log(calls)`` against ``log(n)``."""
    n, calls = np.array(list(table), dtype=float).T
    return float(np.polyfit(np.log(n), np.log(calls), 1)[0])
