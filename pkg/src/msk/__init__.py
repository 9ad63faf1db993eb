"""Monotone submodular maximization under a knapsack constraint.

Greedy and lazy greedy with execution traces, seeded enumeration
(``enum_greedy``), Greedy+Singleton, the piecewise-exponential bounding
function and its dominance check, brute-force optima, and the coverage
instance that caps Greedy+Singleton below 0.42945.
"""
from .adversarial import AdversarialParams, gen_adversarial, verify_adversarial
from .algorithms import AlgorithmResult, count_complexity, enum_greedy, greedy_plus_singleton
from .bounding import (Partition, build_bounding, build_partition_auto, build_partition_two_block,
                       eval_bounding, verify_dominance)
from .exact import brute_force_opt, ratio_sweep
from .greedy import GreedyTrace, check_density_lemma, eval_value_function, greedy, greedy_lazy, value_function
from .intervals import IntervalSet, measure_union
from .oracle import (CoverageOracle, Instance, ModularOracle, TableOracle, check_monotone_submodular,
                     contract, evaluate, marginal)

__all__ = [
    "AdversarialParams",
    "gen_adversarial",
    "verify_adversarial",
    "AlgorithmResult",
    "count_complexity",
    "enum_greedy",
    "greedy_plus_singleton",
    "Partition",
    "build_bounding",
    "build_partition_auto",
    "build_partition_two_block",
    "eval_bounding",
    "verify_dominance",
    "brute_force_opt",
    "ratio_sweep",
    "GreedyTrace",
    "check_density_lemma",
    "eval_value_function",
    "greedy",
    "greedy_lazy",
    "value_function",
    "IntervalSet",
    "measure_union",
    "CoverageOracle",
    "Instance",
    "ModularOracle",
    "TableOracle",
    "check_monotone_submodular",
    "contract",
    "evaluate",
    "marginal",
]

__version__ = "0.1.0"
