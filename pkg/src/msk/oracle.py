"""Set-function value oracles, knapsack instances and structural checkers.

Every oracle charges one call per evaluation of ``f(S)``.  Marginals are
charged two calls, whether computed from two evaluations or
incrementally, so call counts follow the value-oracle cost model.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .intervals import IntervalSet, UnionTracker, measure_union

#: relative slack on the knapsack constraint for real-valued weights
FEASIBILITY_RTOL = 1e-12
CHECK_TOL = 1e-9
TABLE_MAX_N = 24
CHECK_MAX_N = 16


class MalformedOracleError(ValueError):
    pass


class SizeLimitError(ValueError):
    pass


def _ids(S: Iterable[int], n: int) -> tuple[int, ...]:
    ids = tuple(sorted({int(e) for e in S}))
    if ids and (ids[0] < 0 or ids[-1] >= n):
        bad = ids[0] if ids[0] < 0 else ids[-1]
        raise ValueError(f"unknown element id {bad} (ground set has {n} elements)")
    return ids


class SetFunctionOracle:
    """Base value oracle over the ground set ``0..n-1``."""

    kind = "abstract"

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("ground set size must be non-negative")
        self.n = int(n)
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    def _charge(self, k: int = 1) -> None:
        with self._lock:
            self._calls += k

    def reset_calls(self) -> None:
        with self._lock:
            self._calls = 0

    def _value(self, ids: tuple[int, ...]) -> float:
        raise NotImplementedError

    def evaluate(self, S: Iterable[int]) -> float:
        ids = _ids(S, self.n)
        self._charge()
        return self._value(ids)

    def marginal(self, A: Iterable[int], S: Iterable[int]) -> float:
        A = set(A)
        return self.evaluate(A.union(S)) - self.evaluate(A)

    def prefix(self, base: Iterable[int] = ()) -> "Prefix":
        """Running set starting at ``base`` (charges one call for ``f(base)``)."""
        return Prefix(self, base)

    def all_subset_values(self) -> np.ndarray:
        """``f`` on every subset, indexed by bitmask; charges ``2**n`` calls."""
        out = np.empty(1 << self.n)
        for mask in range(1 << self.n):
            out[mask] = self.evaluate(i for i in range(self.n) if mask >> i & 1)
        return out


class Prefix:
    """A growing set ``A`` with marginal-gain queries ``f_A({e})``."""

    def __init__(self, oracle: SetFunctionOracle, base: Iterable[int] = ()):
        self.oracle = oracle
        self.members = set(_ids(base, oracle.n))
        self.value = oracle.evaluate(self.members)

    def gain(self, e: int) -> float:
        return self.oracle.marginal(self.members, (e,))

    def add(self, e: int, gain: float | None = None) -> None:
        if gain is None:
            gain = self.gain(e)
        self.members.add(e)
        self.value += gain


class ModularOracle(SetFunctionOracle):
    kind = "modular"

    def __init__(self, values: Sequence[float]):
        v = np.asarray(values, dtype=float).reshape(-1)
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("modular values must be finite and non-negative")
        super().__init__(v.size)
        self.values = v
        self.values.flags.writeable = False

    def _value(self, ids):
        return float(sum(self.values[i] for i in ids))

    def prefix(self, base=()):
        return _ModularPrefix(self, base)

    def all_subset_values(self):
        self._charge(1 << self.n)
        out = np.empty(1 << self.n)
        for lo, hi, member in _membership_chunks(self.n):
            out[lo:hi] = member @ self.values
        return out


class _ModularPrefix(Prefix):
    def gain(self, e):
        self.oracle._charge(2)
        return 0.0 if e in self.members else float(self.oracle.values[e])


class TableOracle(SetFunctionOracle):
    """Explicit value table keyed by sorted id tuples."""

    kind = "table"

    def __init__(self, n: int, table: dict):
        if n > TABLE_MAX_N:
            raise SizeLimitError(f"table oracles support n <= {TABLE_MAX_N}, got {n}")
        super().__init__(n)
        self.table: dict[tuple[int, ...], float] = {}
        for key, val in table.items():
            ids = _ids(key, n)
            self.table[ids] = float(val)

    @classmethod
    def from_function(cls, n: int, fn) -> "TableOracle":
        return cls(n, {S: fn(frozenset(S)) for k in range(n + 1) for S in combinations(range(n), k)})

    def _value(self, ids):
        try:
            return self.table[ids]
        except KeyError:
            raise MalformedOracleError(f"table oracle has no value for subset {list(ids)}") from None


class CoverageOracle(SetFunctionOracle):
    """``f(S)`` is the Lebesgue measure of the union of the elements' intervals."""

    kind = "coverage"

    def __init__(self, intervals: Sequence[IntervalSet]):
        sets = [s if isinstance(s, IntervalSet) else IntervalSet(s) for s in intervals]
        super().__init__(len(sets))
        self.intervals = tuple(sets)

    def _value(self, ids):
        return measure_union(self.intervals[i] for i in ids)

    def prefix(self, base=()):
        return _CoveragePrefix(self, base)

    def all_subset_values(self):
        # elementary cells between consecutive endpoints; an element covers a cell wholesale
        self._charge(1 << self.n)
        if self.n == 0:
            return np.zeros(1)
        pts = np.unique([x for s in self.intervals for p in s.pairs for x in p])
        if pts.size < 2:
            return np.zeros(1 << self.n)
        lengths = np.diff(pts)
        mids = (pts[:-1] + pts[1:]) / 2
        incidence = np.zeros((self.n, lengths.size))
        for i, s in enumerate(self.intervals):
            for a, b in s.pairs:
                incidence[i] += (mids >= a) & (mids < b)
        out = np.empty(1 << self.n)
        for lo, hi, member in _membership_chunks(self.n):
            out[lo:hi] = ((member @ incidence) > 0) @ lengths
        return out


class _CoveragePrefix(Prefix):
    def __init__(self, oracle, base=()):
        self.oracle = oracle
        self.members = set(_ids(base, oracle.n))
        self.union = UnionTracker()
        for e in sorted(self.members):
            self.union.add(oracle.intervals[e])
        oracle._charge()
        self.value = measure_union(oracle.intervals[e] for e in self.members)

    def gain(self, e):
        self.oracle._charge(2)
        if e in self.members:
            return 0.0
        return self.union.uncovered(self.oracle.intervals[e])

    def add(self, e, gain=None):
        if gain is None:
            gain = self.gain(e)
        if e not in self.members:
            self.members.add(e)
            self.union.add(self.oracle.intervals[e])
        self.value += gain


class ContractedOracle(SetFunctionOracle):
    """``f_G(S) = f(G | S) - f(G)``; evaluations are charged to the parent."""

    def __init__(self, parent: SetFunctionOracle, G: Iterable[int]):
        # no lock/counter of its own: calls live on the parent
        self.n = parent.n
        self.parent = parent
        self.G = frozenset(_ids(G, parent.n))
        self.base_value = parent.evaluate(self.G)

    kind = property(lambda self: self.parent.kind)

    @property
    def calls(self) -> int:
        return self.parent.calls

    def _charge(self, k=1):
        self.parent._charge(k)

    def reset_calls(self):
        self.parent.reset_calls()

    def evaluate(self, S):
        ids = _ids(S, self.n)
        return self.parent.evaluate(self.G.union(ids)) - self.base_value

    def prefix(self, base=()):
        return _OffsetPrefix(self.parent.prefix(self.G.union(_ids(base, self.n))), self.base_value)

    def all_subset_values(self):
        g = 0
        for e in self.G:
            g |= 1 << e
        full = self.parent.all_subset_values()
        masks = np.arange(1 << self.n)
        return full[masks | g] - self.base_value


class _OffsetPrefix(Prefix):
    def __init__(self, inner: Prefix, offset: float):
        self.inner = inner
        self.offset = offset

    @property
    def members(self):
        return self.inner.members

    @property
    def value(self):
        return self.inner.value - self.offset

    def gain(self, e):
        return self.inner.gain(e)

    def add(self, e, gain=None):
        self.inner.add(e, gain)


def contract(oracle: SetFunctionOracle, G: Iterable[int]) -> ContractedOracle:
    return ContractedOracle(oracle, G)


def evaluate(oracle: SetFunctionOracle, S: Iterable[int]) -> float:
    return oracle.evaluate(S)


def marginal(oracle: SetFunctionOracle, A: Iterable[int], S: Iterable[int]) -> float:
    return oracle.marginal(A, S)


def _membership(n: int, lo: int = 0, hi: int | None = None) -> np.ndarray:
    """Rows are bitmasks ``lo..hi-1``; column ``i`` is 1.0 iff bit ``i`` is set."""
    if hi is None:
        hi = 1 << n
    masks = np.arange(lo, hi, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def _membership_chunks(n: int, chunk: int = 1 << 16):
    for lo in range(0, 1 << n, chunk):
        hi = min(lo + chunk, 1 << n)
        yield lo, hi, _membership(n, lo, hi)


def mask_to_ids(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class Instance:
    """Knapsack instance ``(E, f, w, W)`` over ids ``0..n-1``."""

    weights: np.ndarray
    capacity: float
    oracle: SetFunctionOracle = field(compare=False)
    #: residual instances (after seeding) may have zero capacity left
    residual: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        cap = float(self.capacity)
        if self.residual:
            cap = max(cap, 0.0)
        object.__setattr__(self, "capacity", cap)
        if w.size != self.oracle.n:
            raise ValueError(f"{w.size} weights for an oracle over {self.oracle.n} elements")
        if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
        if not (self.capacity > 0 or self.residual) or not math.isfinite(self.capacity):
            raise ValueError("capacity must be positive and finite")

    @property
    def n(self) -> int:
        return self.weights.size

    def weight(self, S: Iterable[int]) -> float:
        return math.fsum(self.weights[i] for i in S)

    def fits(self, total_weight: float) -> bool:
        return total_weight <= self.capacity * (1 + FEASIBILITY_RTOL)

    def feasible(self, S: Iterable[int]) -> bool:
        return self.fits(self.weight(S))

    def contract(self, G: Iterable[int]) -> "Instance":
        """Residual instance ``(E, f_G, w, W - w(G))``."""
        G = tuple(G)
        return Instance(self.weights, self.capacity - self.weight(G), contract(self.oracle, G), residual=True)


@dataclass
class CheckReport:
    monotone: bool
    submodular: bool
    monotone_witness: tuple | None = None
    submodular_witness: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.monotone and self.submodular

    @property
    def witness(self):
        return self.submodular_witness if not self.submodular else self.monotone_witness


def check_monotone_submodular(oracle: SetFunctionOracle, n: int | None = None,
                              tol: float = CHECK_TOL) -> CheckReport:
    """Exhaustive check of monotonicity and diminishing returns.

    Monotone witness is ``(S, e)`` with ``f(S + e) < f(S)``; submodular
    witness is ``(A, B, e)`` with ``A`` a subset of ``B`` and
    ``f_A(e) < f_B(e)``.  Violations smaller than ``tol`` are ignored.
    """
    n = oracle.n if n is None else n
    if n != oracle.n:
        raise ValueError(f"n={n} does not match the oracle's ground set ({oracle.n})")
    if n > CHECK_MAX_N:
        raise SizeLimitError(f"exhaustive check supports n <= {CHECK_MAX_N}, got {n}")
    f = oracle.all_subset_values()
    masks = np.arange(1 << n)
    report = CheckReport(True, True)
    for e in range(n):
        bit = 1 << e
        S = masks[(masks & bit) == 0]
        bad = np.flatnonzero(f[S | bit] < f[S] - tol)
        if bad.size:
            report.monotone = False
            report.monotone_witness = (mask_to_ids(int(S[bad[0]])), e)
            break
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            bi, bj = 1 << i, 1 << j
            S = masks[(masks & (bi | bj)) == 0]
            lhs = f[S | bi] - f[S]
            rhs = f[S | bi | bj] - f[S | bj]
            bad = np.flatnonzero(lhs < rhs - tol)
            if bad.size:
                A = int(S[bad[0]])
                report.submodular = False
                report.submodular_witness = (mask_to_ids(A), mask_to_ids(A | bj), i)
                return report
    return report
