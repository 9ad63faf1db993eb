"""Piecewise-exponential lower envelope of the greedy value function.

Given a density-sorted partition ``X_1, ..., X_k`` of a feasible set, with
prefixes ``S_j`` and rates ``r_j = f_{S_{j-1}}(X_j) / w(X_j)``, the
bounding function is

    h(u) = f(S_j) - r_j * w(S_j) * exp(-(u - D_{j-1}) / w(S_j)),   D_{j-1} <= u < D_j

with ``D_0 = 0``, ``D_j = sum_{i<=j} w(X_i) * ln(r_i / r_{j+1})`` and
``D_k = inf``.  ``verify_dominance`` checks ``V(u) >= h(u)`` on
``[0, W_max]`` numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .greedy import DENSITY_TOL, GreedyTrace, value_function
from .oracle import Instance, contract

RATE_TOL = 1e-9
CONTINUITY_TOL = 1e-9
DOMINANCE_TOL = 1e-9


class InvalidPartitionError(ValueError):
    pass


class BoundingStructureError(AssertionError):
    """A constructed bounding function broke monotone breakpoints or continuity."""


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(int(e) for e in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise InvalidPartitionError("partition blocks must be nonempty")
            if seen & b:
                raise InvalidPartitionError(f"blocks overlap on {sorted(seen & b)}")
            seen |= b

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def support(self) -> frozenset[int]:
        return frozenset().union(*self.blocks)

    @classmethod
    def singletons(cls, order: Iterable[int]) -> "Partition":
        return cls(tuple(frozenset((e,)) for e in order))


def _check_fits(instance: Instance, X: Iterable[int]) -> None:
    if not instance.feasible(X):
        raise InvalidPartitionError(f"w(X) = {instance.weight(X)} exceeds capacity {instance.capacity}")


def build_partition_auto(instance: Instance, X: Iterable[int]) -> Partition:
    """Singleton blocks in greedy order restricted to ``X``."""
    remaining = sorted({int(e) for e in X})
    if not remaining:
        raise ValueError("X must be nonempty")
    _check_fits(instance, remaining)
    prefix = instance.oracle.prefix()
    w = instance.weights
    order = []
    while remaining:
        dens = [prefix.gain(e) / w[e] for e in remaining]
        best = max(dens)
        cut = best - DENSITY_TOL * max(1.0, abs(best))
        k = next(i for i, d in enumerate(dens) if d >= cut)
        e = remaining.pop(k)
        prefix.add(e, dens[k] * w[e])
        order.append(e)
    return Partition.singletons(order)


def build_partition_two_block(instance: Instance, G: Iterable[int], Y: Iterable[int],
                              oracle=None) -> Partition:
    """``({e*}, R)`` ordered by density under ``f_G``, where ``e*`` is the heaviest of ``Y \\ G``."""
    G = frozenset(int(g) for g in G)
    rest = sorted({int(y) for y in Y} - G)
    if not rest:
        raise ValueError("Y must contain an element outside G")
    fG = contract(instance.oracle, G) if oracle is None else oracle
    w = instance.weights
    e_star = max(rest, key=lambda e: (w[e], -e))
    R = frozenset(rest) - {e_star}
    if not R:
        return Partition((frozenset((e_star,)),))
    d_star = fG.evaluate((e_star,)) / w[e_star]
    d_rest = fG.evaluate(R) / instance.weight(R)
    if d_star >= d_rest:
        return Partition((frozenset((e_star,)), R))
    return Partition((R, frozenset((e_star,))))


@dataclass(frozen=True)
class BoundingFunction:
    """Segment ``j`` (0-based) covers ``[D[j], D[j+1])``; ``D[k]`` is ``inf``."""

    f_prefix: np.ndarray   # f(S_1), ..., f(S_k)
    w_prefix: np.ndarray   # w(S_1), ..., w(S_k)
    rates: np.ndarray      # r_1, ..., r_k
    D: np.ndarray          # D_0, ..., D_{k-1}, D_k = inf
    f_empty: float

    @property
    def k(self) -> int:
        return self.rates.size

    @property
    def finite_breakpoints(self) -> np.ndarray:
        return self.D[np.isfinite(self.D)]

    def segment_value(self, j: int, u):
        return self.f_prefix[j] - self.rates[j] * self.w_prefix[j] * np.exp(-(u - self.D[j]) / self.w_prefix[j])

    def __call__(self, u):
        return eval_bounding(self, u)


def _breakpoints(w_blocks: np.ndarray, rates: np.ndarray) -> np.ndarray:
    k = rates.size
    D = np.empty(k + 1)
    D[0] = 0.0
    D[k] = math.inf
    for j in range(1, k):
        nxt = rates[j]
        if nxt <= 0:
            D[j] = math.inf
            continue
        # rates within tolerance of each other are treated as equal (ratio >= 1)
        logs = [math.log(max(r / nxt, 1.0)) for r in rates[:j]]
        D[j] = math.fsum(wb * lg for wb, lg in zip(w_blocks[:j], logs))
    return D


def build_bounding(instance: Instance, partition: Partition) -> BoundingFunction:
    f = instance.oracle
    _check_fits(instance, partition.support)
    w_blocks = np.array([instance.weight(b) for b in partition.blocks])
    f_empty = f.evaluate(())
    prefix_sets = []
    acc: frozenset[int] = frozenset()
    for b in partition.blocks:
        acc = acc | b
        prefix_sets.append(acc)
    f_prefix = np.array([f.evaluate(S) for S in prefix_sets])
    gains = np.diff(np.concatenate(([f_empty], f_prefix)))
    rates = np.maximum(gains, 0.0) / w_blocks
    for j in range(1, rates.size):
        if rates[j] > rates[j - 1] + RATE_TOL * max(1.0, abs(rates[j - 1])):
            raise InvalidPartitionError(
                f"rates must be non-increasing: r_{j} = {rates[j - 1]!r} < r_{j + 1} = {rates[j]!r}")
    h = BoundingFunction(f_prefix, np.cumsum(w_blocks), rates, _breakpoints(w_blocks, rates), f_empty)
    _assert_structure(h)
    return h


def continuity_gaps(h: BoundingFunction) -> list[tuple[float, float]]:
    """``(D_j, |lim_{u -> D_j^-} h(u) - h(D_j)|)`` at every positive finite breakpoint."""
    out = []
    D = h.D
    for j in range(1, h.k):
        d = D[j]
        if not math.isfinite(d) or d <= 0 or d == D[j - 1]:
            continue
        # the last segment of positive length ending at d
        left = max(i for i in range(j) if D[i] < d)
        out.append((float(d), abs(float(h.segment_value(left, d)) - float(eval_bounding(h, d)))))
    return out


def _assert_structure(h: BoundingFunction) -> None:
    D = h.D
    if np.any(D[1:] < D[:-1]):
        raise BoundingStructureError(f"breakpoints not monotone: {D.tolist()}")
    scale = max(1.0, float(np.max(np.abs(h.f_prefix))) if h.k else 1.0)
    for d, gap in continuity_gaps(h):
        if gap > CONTINUITY_TOL * scale:
            raise BoundingStructureError(f"h discontinuous at D = {d}: jump {gap}")


def eval_bounding(h: BoundingFunction, u):
    x = np.asarray(u, dtype=float)
    seg = np.searchsorted(h.D[:-1], x, side="right") - 1
    seg = np.clip(seg, 0, h.k - 1)
    out = h.f_prefix[seg] - h.rates[seg] * h.w_prefix[seg] * np.exp(-(x - h.D[seg]) / h.w_prefix[seg])
    return float(out) if out.ndim == 0 else out


@dataclass
class DominanceReport:
    ok: bool
    min_slack: float
    argmin_u: float
    W_max: float
    grid_points: int
    degenerate: bool = False

    def to_json(self) -> dict:
        return {"W_max": self.W_max, "min_slack": self.min_slack, "argmin_u": self.argmin_u,
                "grid_points": self.grid_points, "ok": self.ok, "degenerate": self.degenerate}


def dominance_domain(instance: Instance, trace: GreedyTrace, X: Iterable[int]) -> float:
    X = list(X)
    heaviest = max(instance.weights[e] for e in X)
    return min(instance.capacity - heaviest, trace.weight)


def verify_dominance(instance: Instance, trace: GreedyTrace, partition: Partition,
                     grid_points: int = 1000, h: BoundingFunction | None = None) -> DominanceReport:
    """Check ``V(u) >= h(u) - 1e-9`` on ``[0, W_max]``.

    Samples every breakpoint of ``V`` and ``h`` inside the domain, all
    midpoints between consecutive sample structure points, and a uniform
    grid of ``grid_points`` values.
    """
    if grid_points < 1:
        raise ValueError("grid_points must be positive")
    W_max = dominance_domain(instance, trace, partition.support)
    if W_max < 0:
        return DominanceReport(True, math.inf, math.nan, W_max, grid_points, degenerate=True)
    if h is None:
        h = build_bounding(instance, partition)
    V = value_function(trace)
    W_max = min(W_max, V.domain_end)
    structure = np.concatenate((V.u, h.finite_breakpoints, [0.0, W_max]))
    structure = np.unique(structure[(structure >= 0) & (structure <= W_max)])
    mids = (structure[:-1] + structure[1:]) / 2
    pts = np.unique(np.concatenate((structure, mids, np.linspace(0.0, W_max, grid_points))))
    slack = V(pts) - h(pts)
    slack = np.atleast_1d(slack)
    i = int(np.argmin(slack))
    return DominanceReport(bool(slack[i] >= -DOMINANCE_TOL), float(slack[i]), float(pts[i]),
                           float(W_max), grid_points)
