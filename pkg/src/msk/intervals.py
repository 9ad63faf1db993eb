"""Half-open real intervals and the Lebesgue measure of their unions."""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Iterable, Sequence

import numpy as np


class IntervalSet:
    """Sorted, pairwise disjoint half-open intervals ``[a, b)``.

    Construction validates; use :meth:`merged` to build from arbitrary
    (possibly overlapping) pieces.
    """

    __slots__ = ("_pairs",)

    def __init__(self, pairs: Iterable[Sequence[float]] = ()):
        items = []
        for p in pairs:
            a, b = float(p[0]), float(p[1])
            if not (a < b):
                raise ValueError(f"malformed interval [{a}, {b}): need a < b")
            items.append((a, b))
        items.sort()
        for (a0, b0), (a1, _) in zip(items, items[1:]):
            if a1 < b0:
                raise ValueError(f"intervals [{a0}, {b0}) and [{a1}, ...) overlap")
        self._pairs = tuple(items)

    @classmethod
    def merged(cls, pairs: Iterable[Sequence[float]]) -> "IntervalSet":
        items = sorted((float(a), float(b)) for a, b in pairs)
        out: list[list[float]] = []
        for a, b in items:
            if not (a < b):
                raise ValueError(f"malformed interval [{a}, {b}): need a < b")
            if out and a <= out[-1][1]:
                out[-1][1] = max(out[-1][1], b)
            else:
                out.append([a, b])
        return cls(out)

    @property
    def pairs(self) -> tuple[tuple[float, float], ...]:
        return self._pairs

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self._pairs)

    def __iter__(self):
        return iter(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:
        body = ", ".join(f"[{a!r}, {b!r})" for a, b in self._pairs)
        return f"IntervalSet({body})"


def _endpoint_arrays(sets: Iterable[IntervalSet]) -> tuple[np.ndarray, np.ndarray]:
    starts: list[float] = []
    ends: list[float] = []
    for s in sets:
        for a, b in s.pairs:
            starts.append(a)
            ends.append(b)
    return np.asarray(starts, dtype=float), np.asarray(ends, dtype=float)


def union_measure_arrays(starts: np.ndarray, ends: np.ndarray) -> float:
    """Measure of the union of ``[starts[i], ends[i])`` by an endpoint sweep."""
    if starts.size == 0:
        return 0.0
    order = np.lexsort((ends, starts))
    s = starts[order]
    e = ends[order]
    reach = np.maximum.accumulate(e)
    # a new block opens where the interval starts strictly after everything so far
    opens = np.empty(s.size, dtype=bool)
    opens[0] = True
    opens[1:] = s[1:] > reach[:-1]
    first = np.flatnonzero(opens)
    last = np.append(first[1:] - 1, s.size - 1)
    return float(np.sum(reach[last] - s[first]))


def measure_union(sets: Iterable[IntervalSet]) -> float:
    """Lebesgue measure of the union of several interval sets."""
    starts, ends = _endpoint_arrays(sets)
    if starts.size and np.any(ends <= starts):
        raise ValueError("malformed interval: need a < b")
    return union_measure_arrays(starts, ends)


class UnionTracker:
    """Growing union of intervals supporting uncovered-length queries.

    Segments are kept merged (touching pieces fuse), so the measure of a
    piece outside the union is computed against a handful of neighbours.
    """

    def __init__(self) -> None:
        self._starts: list[float] = []
        self._ends: list[float] = []

    @property
    def segments(self) -> list[tuple[float, float]]:
        return list(zip(self._starts, self._ends))

    def uncovered(self, intervals: IntervalSet) -> float:
        starts, ends = self._starts, self._ends
        total = 0.0
        for a, b in intervals.pairs:
            covered = 0.0
            i = bisect_right(ends, a)
            while i < len(starts) and starts[i] < b:
                covered += min(b, ends[i]) - max(a, starts[i])
                i += 1
            total += (b - a) - covered
        return total

    def add(self, intervals: IntervalSet) -> None:
        starts, ends = self._starts, self._ends
        for a, b in intervals.pairs:
            i = bisect_left(ends, a)
            j = bisect_right(starts, b)
            if i < j:
                a = min(a, starts[i])
                b = max(b, ends[j - 1])
            starts[i:j] = [a]
            ends[i:j] = [b]
