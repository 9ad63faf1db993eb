"""Instance files: versioned JSON with full-precision numbers.

Layout (version 1)::

    {
      "schema": "msk-instance", "version": 1,
      "n": 3,
      "weights": [8.0, 8.0, 1.0],
      "capacity": 16.0,
      "oracle": {"kind": "modular", "values": [8.0, 8.0, 2.0]}
    }

``oracle.kind`` is one of ``modular`` (``values``: one number per
element), ``table`` (``table``: map from comma-joined sorted ids to a
number, ``""`` for the empty set) or ``coverage`` (``intervals``: per
element, a list of ``[a, b]`` pairs read as half-open ``[a, b)``).  Any
extra top-level keys (e.g. ``adversarial``) are carried through as
metadata.  Floats are written with 17 significant digits.
"""
from __future__ import annotations

import json
import math
from typing import Any

from .intervals import IntervalSet
from .oracle import CoverageOracle, Instance, ModularOracle, SetFunctionOracle, TableOracle

SCHEMA = "msk-instance"
VERSION = 1


class InstanceFormatError(ValueError):
    """The file does not follow the instance layout."""


def _num(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def dumps(obj: Any) -> str:
    """JSON text with floats at 17 significant digits (compact)."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def oracle_payload(oracle: SetFunctionOracle) -> dict:
    if isinstance(oracle, ModularOracle):
        return {"kind": "modular", "values": [float(v) for v in oracle.values]}
    if isinstance(oracle, TableOracle):
        return {"kind": "table",
                "table": {",".join(map(str, k)): v for k, v in sorted(oracle.table.items())}}
    if isinstance(oracle, CoverageOracle):
        return {"kind": "coverage", "intervals": [[list(p) for p in s.pairs] for s in oracle.intervals]}
    raise TypeError(f"oracle kind {oracle.kind!r} has no file representation")


def instance_to_dict(instance: Instance, metadata: dict | None = None) -> dict:
    out = {"schema": SCHEMA, "version": VERSION, "n": instance.n,
           "weights": [float(w) for w in instance.weights],
           "capacity": instance.capacity,
           "oracle": oracle_payload(instance.oracle)}
    if metadata:
        out.update(metadata)
    return out


def save_instance(instance: Instance, path, metadata: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(instance_to_dict(instance, metadata)))
        fh.write("\n")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InstanceFormatError(msg)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _parse_oracle(spec: Any, n: int) -> SetFunctionOracle:
    _require(isinstance(spec, dict), "'oracle' must be an object")
    kind = spec.get("kind")
    if kind == "modular":
        values = spec.get("values")
        _require(isinstance(values, list) and len(values) == n and all(map(_is_num, values)),
                 f"modular oracle needs 'values': {n} numbers")
        return ModularOracle(values)
    if kind == "table":
        table = spec.get("table")
        _require(isinstance(table, dict) and all(map(_is_num, table.values())),
                 "table oracle needs 'table': map of id lists to numbers")
        parsed = {}
        for key, val in table.items():
            try:
                ids = tuple(int(t) for t in key.split(",")) if key else ()
            except ValueError:
                raise InstanceFormatError(f"bad table key {key!r}") from None
            parsed[ids] = val
        return TableOracle(n, parsed)
    if kind == "coverage":
        intervals = spec.get("intervals")
        _require(isinstance(intervals, list) and len(intervals) == n,
                 f"coverage oracle needs 'intervals': {n} per-element lists")
        sets = []
        for e, pieces in enumerate(intervals):
            _require(isinstance(pieces, list)
                     and all(isinstance(p, list) and len(p) == 2 and all(map(_is_num, p)) for p in pieces),
                     f"element {e}: intervals must be [a, b] number pairs")
            sets.append(IntervalSet(pieces))
        return CoverageOracle(sets)
    raise InstanceFormatError(f"unknown oracle kind {kind!r}")


def instance_from_dict(data: Any) -> tuple[Instance, dict]:
    """Build an instance; returns it with the extra top-level metadata.

    Layout problems raise :class:`InstanceFormatError`; well-formed data
    that breaks an instance invariant raises plain ``ValueError``.
    """
    _require(isinstance(data, dict), "instance file must hold a JSON object")
    _require(data.get("version", VERSION) == VERSION, f"unsupported version {data.get('version')!r}")
    n = data.get("n")
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 0, "'n' must be a non-negative integer")
    weights = data.get("weights")
    _require(isinstance(weights, list) and len(weights) == n and all(map(_is_num, weights)),
             f"'weights' must be {n} numbers")
    _require(_is_num(data.get("capacity")), "'capacity' must be a number")
    oracle = _parse_oracle(data.get("oracle"), n)
    meta = {k: v for k, v in data.items()
            if k not in {"schema", "version", "n", "weights", "capacity", "oracle"}}
    return Instance(weights, data["capacity"], oracle), meta


def load_instance(path) -> tuple[Instance, dict]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(data)
