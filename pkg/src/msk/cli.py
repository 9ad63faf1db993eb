"""Command-line front end.

Exit codes: 0 ok, 2 input error, 3 invariant violation, 4 adversarial
construction infeasible.  ``MSK_THREADS`` caps worker threads.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import adversarial, algorithms, bounding, exact, oracle, serialize
from .greedy import greedy

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_INFEASIBLE = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, default=_jsonable)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _jsonable(x):
    if hasattr(x, "item"):
        return x.item()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _load(path: str):
    try:
        return serialize.load_instance(path)
    except serialize.InstanceFormatError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, f"{path}: {exc}") from None


def cmd_run(args) -> int:
    instance, _ = _load(args.instance)
    result = algorithms.run_algorithm(args.alg, instance)
    payload = result.to_json()
    payload["alg"] = args.alg
    if args.alg != "greedy":
        payload.pop("trace", None)
    if not instance.feasible(result.solution):
        raise CliError(EXIT_INVARIANT, f"infeasible solution returned: {sorted(result.solution)}")
    _emit(payload, args.out)
    return EXIT_OK


def cmd_gen_adversarial(args) -> int:
    try:
        inst = adversarial.gen_adversarial(args.epsilon, structure_only=args.structure_only)
    except adversarial.ConstructionInfeasibleError as exc:
        raise CliError(EXIT_INFEASIBLE, str(exc)) from None
    serialize.save_instance(inst.instance, args.out, inst.metadata())
    print(json.dumps({"out": args.out, "n": inst.instance.n, "k1": inst.k1, "k2": inst.k2,
                      "epsilon_eff": inst.epsilon_eff, "structure_only": inst.structure_only}))
    return EXIT_OK


def cmd_verify_adversarial(args) -> int:
    instance, meta = _load(args.instance)
    if "adversarial" not in meta:
        raise CliError(EXIT_INPUT, f"{args.instance} has no 'adversarial' metadata")
    inst = adversarial.AdversarialInstance.from_metadata(instance, meta)
    report = adversarial.verify_adversarial(inst)
    _emit(report.to_json(), args.out)
    ok = report.trace_match and report.densities_ok
    return EXIT_OK if ok else EXIT_INVARIANT


def _parse_ids(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(EXIT_INPUT, f"bad id list {text!r}") from None


def cmd_verify_bound(args) -> int:
    instance, _ = _load(args.instance)
    if args.X is not None:
        X = _parse_ids(args.X)
    else:
        try:
            _, X = exact.brute_force_opt(instance)
        except oracle.SizeLimitError as exc:
            raise CliError(EXIT_INPUT, f"{exc}; pass --X explicitly") from None
    X = sorted(X)
    if not X:
        raise CliError(EXIT_INPUT, "X is empty; nothing to bound")
    try:
        partition = bounding.build_partition_auto(instance, X)
        trace = greedy(instance)
        report = bounding.verify_dominance(instance, trace, partition, args.grid)
    except bounding.BoundingStructureError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    payload = report.to_json()
    payload["X"] = X
    payload["partition"] = [sorted(b) for b in partition.blocks]
    _emit(payload, args.out)
    return EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_sweep(args) -> int:
    algs = [a for a in args.algs.split(",") if a]
    unknown = [a for a in algs if a not in algorithms.ALGORITHMS]
    if unknown:
        raise CliError(EXIT_INPUT, f"unknown algorithms {unknown}")
    try:
        records = exact.ratio_sweep(args.family, algs, args.trials, args.seed, n=args.n,
                                    workers=algorithms.default_workers())
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    if args.csv:
        exact.write_csv(records, args.csv)
    summary = {}
    for a in algs:
        ratios = [r.ratio for r in records if r.alg == a]
        summary[a] = {"min_ratio": min(ratios) if ratios else None,
                      "mean_ratio": sum(ratios) / len(ratios) if ratios else None}
    print(json.dumps({"family": args.family, "n": args.n, "trials": args.trials, "seed": args.seed,
                      "summary": summary}, indent=2))
    return EXIT_OK


def bad_example_report(N: float) -> dict:
    inst = exact.bad_example(N)
    opt, opt_set = exact.brute_force_opt(inst)
    out = {"N": N, "opt": opt, "opt_set": sorted(opt_set), "threshold": 1 - math.exp(-1)}
    for kappa in (1, 2):
        res = algorithms.enum_greedy(inst, kappa)
        out[f"enum{kappa}"] = {"value": res.value, "solution": sorted(res.solution),
                               "ratio": res.value / opt}
    return out


def cmd_bad_example(args) -> int:
    if args.N < 2:
        raise CliError(EXIT_INPUT, "N must be at least 2")
    _emit(bad_example_report(args.N), args.out)
    return EXIT_OK


def cmd_check_oracle(args) -> int:
    instance, _ = _load(args.instance)
    try:
        rep = oracle.check_monotone_submodular(instance.oracle)
    except oracle.SizeLimitError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    except oracle.MalformedOracleError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from None
    _emit({"monotone": rep.monotone, "submodular": rep.submodular,
           "monotone_witness": rep.monotone_witness, "submodular_witness": rep.submodular_witness}, args.out)
    return EXIT_OK if rep.ok else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msk", description="Monotone submodular maximization under a knapsack constraint")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("run", help="run an algorithm on an instance file")
    s.add_argument("--instance", required=True)
    s.add_argument("--alg", required=True, choices=sorted(algorithms.ALGORITHMS))
    s.add_argument("--out")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("gen-adversarial", help="write the Greedy+Singleton worst-case instance")
    s.add_argument("--epsilon", type=float, default=adversarial.DEFAULT_EPSILON)
    s.add_argument("--structure-only", action="store_true",
                   help="skip the capacity lock-out check (coarse epsilon allowed)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen_adversarial)

    s = sub.add_parser("verify-adversarial", help="replay greedy on a generated worst-case instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_adversarial)

    s = sub.add_parser("verify-bound", help="check V >= h for the greedy run on an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--X", help="comma-separated ids of the bounded set (default: brute-force optimum)")
    s.add_argument("--grid", type=int, default=1000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_bound)

    s = sub.add_parser("sweep", help="approximation ratios against brute force on random instances")
    s.add_argument("--family", choices=sorted(exact.FAMILIES), default="coverage")
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--algs", default="enum2,gps")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("bad-example", help="single-seed enumeration counterexample")
    s.add_argument("--N", type=float, default=8.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_bad_example)

    s = sub.add_parser("check-oracle", help="exhaustive monotonicity/submodularity check")
    s.add_argument("--instance", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_check_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"msk {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
