"""Density greedy for knapsack-constrained maximization, its lazy twin,
execution traces and the piecewise-linear value function ``V``.

The greedy repeatedly considers the remaining element of largest marginal
density ``f_A(e) / w(e)`` and keeps it only if it still fits.  Densities
within ``DENSITY_TOL`` (relative) of the maximum count as tied and go to
the smallest id, so floating-point noise cannot decide a genuine tie.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .oracle import Instance

DENSITY_TOL = 1e-9


def _tie_tol(best: float) -> float:
    return DENSITY_TOL * max(1.0, abs(best))


@dataclass(frozen=True)
class Considered:
    element: int
    marginal: float
    density: float
    selected: bool


@dataclass(frozen=True)
class Selection:
    element: int
    prefix_weight: float
    prefix_value: float


@dataclass
class GreedyTrace:
    considered: list[Considered] = field(default_factory=list)
    selected: list[Selection] = field(default_factory=list)
    f_empty: float = 0.0

    @property
    def final_set(self) -> frozenset[int]:
        return frozenset(s.element for s in self.selected)

    @property
    def order(self) -> list[int]:
        """Selected ids in selection order (``a_1, ..., a_l``)."""
        return [s.element for s in self.selected]

    @property
    def value(self) -> float:
        return self.selected[-1].prefix_value if self.selected else self.f_empty

    @property
    def weight(self) -> float:
        return self.selected[-1].prefix_weight if self.selected else 0.0

    def to_json(self) -> dict:
        return {
            "f_empty": self.f_empty,
            "considered": [
                {"id": c.element, "marginal": c.marginal, "density": c.density, "selected": c.selected}
                for c in self.considered
            ],
            "selected": [
                {"id": s.element, "prefix_weight": s.prefix_weight, "prefix_value": s.prefix_value}
                for s in self.selected
            ],
            "breakpoints": [list(p) for p in value_function(self).breakpoints],
        }


class _Run:
    """Bookkeeping shared by the plain and lazy scans."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.prefix = instance.oracle.prefix()
        self.trace = GreedyTrace(f_empty=self.prefix.value)
        self.weight = 0.0

    def take(self, e: int, gain: float, density: float) -> bool:
        w = float(self.instance.weights[e])
        fits = bool(self.instance.fits(self.weight + w))
        self.trace.considered.append(Considered(int(e), float(gain), float(density), fits))
        if fits:
            self.prefix.add(e, gain)
            self.weight += w
            self.trace.selected.append(Selection(e, self.weight, self.prefix.value))
        return fits


def greedy(instance: Instance) -> GreedyTrace:
    """Plain greedy: every iteration rescans all remaining elements."""
    run = _Run(instance)
    w = instance.weights
    remaining = list(range(instance.n))
    while remaining:
        gains = [run.prefix.gain(e) for e in remaining]
        dens = [g / w[e] for g, e in zip(gains, remaining)]
        best = max(dens)
        cut = best - _tie_tol(best)
        k = next(i for i, d in enumerate(dens) if d >= cut)
        e = remaining.pop(k)
        run.take(e, gains[k], dens[k])
    return run.trace


def greedy_lazy(instance: Instance) -> GreedyTrace:
    """Lazy-evaluation greedy producing the same trace as :func:`greedy`.

    Stale densities upper-bound fresh ones for submodular ``f``.  Heads are
    refreshed until the best stale bound drops clearly below the best fresh
    density; the winner is the smallest id among fresh densities tied with
    the maximum.
    """
    run = _Run(instance)
    w = instance.weights
    version = 0
    heap: list[tuple[float, int, int, float]] = []
    for e in range(instance.n):
        g = run.prefix.gain(e)
        heap.append((-(g / w[e]), e, version, g))
    heapq.heapify(heap)
    while heap:
        fresh: list[tuple[float, int, int, float]] = []
        best = -math.inf
        while heap:
            negd, e, ver, g = heap[0]
            if fresh and -negd < best - 2 * _tie_tol(best):
                break
            heapq.heappop(heap)
            if ver == version:
                fresh.append((negd, e, ver, g))
                best = max(best, -negd)
            else:
                g = run.prefix.gain(e)
                heapq.heappush(heap, (-(g / w[e]), e, version, g))
        cut = best - _tie_tol(best)
        winner = min((item for item in fresh if -item[0] >= cut), key=lambda item: item[1])
        for item in fresh:
            if item is not winner:
                heapq.heappush(heap, item)
        if run.take(winner[1], winner[3], -winner[0]):
            version += 1
    return run.trace


@dataclass(frozen=True)
class PiecewiseValueFunction:
    """Continuous piecewise-linear ``V`` from used capacity to value."""

    u: np.ndarray
    v: np.ndarray

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.u.tolist(), self.v.tolist()))

    @property
    def domain_end(self) -> float:
        return float(self.u[-1])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.v) / np.diff(self.u)

    def __call__(self, u):
        return eval_value_function(self, u)


def value_function(trace: GreedyTrace, f_empty: float | None = None) -> PiecewiseValueFunction:
    f0 = trace.f_empty if f_empty is None else f_empty
    u = [0.0] + [s.prefix_weight for s in trace.selected]
    v = [f0] + [s.prefix_value for s in trace.selected]
    return PiecewiseValueFunction(np.array(u), np.array(v))


def eval_value_function(V: PiecewiseValueFunction, u):
    """Linear interpolation of ``V``; raises outside ``[0, w(A)]``."""
    x = np.asarray(u, dtype=float)
    slack = 1e-12 * max(1.0, V.domain_end)
    if np.any(x < -slack) or np.any(x > V.domain_end + slack):
        raise ValueError(f"u outside the value-function domain [0, {V.domain_end}]")
    out = np.interp(np.clip(x, 0.0, V.domain_end), V.u, V.v)
    return float(out) if out.ndim == 0 else out


def check_density_lemma(instance: Instance, trace: GreedyTrace, Y: Iterable[int], i: int,
                        tol: float = 1e-9) -> bool:
    """Density of the ``i``-th selection (1-based) against any admissible ``Y``.

    ``Y`` must be nonempty and drawn from ``A_{i-1}`` together with the
    elements still unconsidered when ``a_i`` was picked.
    """
    Y = frozenset(int(y) for y in Y)
    if not Y:
        raise ValueError("Y must be nonempty")
    if not 1 <= i <= len(trace.selected):
        raise ValueError(f"selection index {i} outside 1..{len(trace.selected)}")
    a_i = trace.selected[i - 1].element
    pos = next(k for k, c in enumerate(trace.considered) if c.element == a_i)
    prior = frozenset(s.element for s in trace.selected[: i - 1])
    pending = frozenset(c.element for c in trace.considered[pos:])
    if not Y <= prior | pending:
        raise ValueError(f"Y contains elements rejected before a_{i}: {sorted(Y - prior - pending)}")
    f = instance.oracle
    left = trace.considered[pos].density
    right = (f.evaluate(Y) - f.evaluate(prior)) / instance.weight(Y)
    return left >= right - tol
