import math

import numpy as np
import pytest

from conftest import coverage_instance
from msk.bounding import (InvalidPartitionError, Partition, build_bounding, build_partition_auto,
                          build_partition_two_block, continuity_gaps, verify_dominance)
from msk.greedy import greedy
from msk.oracle import Instance, ModularOracle, TableOracle, contract


def ode_bounding(f_prefix, w_prefix, rates, f_empty, u_end, step=1e-3):
    """Integrate h' = (f(S_j) - h) / w(S_j), advancing j once that slope falls to r_{j+1}.

    Uses no breakpoint formula, so it is an independent check of the
    closed form.  Steps are capped at w(S_j)/50 and the switching point is
    located by bisection inside the step.  Returns (grid, values).
    """
    k = len(rates)
    us = np.linspace(0.0, u_end, int(math.ceil(u_end / step)) + 1)

    def rk4(h, j, dt):
        rhs = lambda y: (f_prefix[j] - y) / w_prefix[j]  # noqa: E731
        k1 = rhs(h)
        k2 = rhs(h + dt / 2 * k1)
        k3 = rhs(h + dt / 2 * k2)
        k4 = rhs(h + dt * k3)
        return h + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    def switched(h, j):
        return j < k - 1 and (f_prefix[j] - h) / w_prefix[j] <= rates[j + 1]

    h, j, out = f_empty, 0, [f_empty]
    for a, b in zip(us[:-1], us[1:]):
        t = a
        while t < b:
            while switched(h, j):
                j += 1
            dt = min(b - t, w_prefix[j] / 50)
            nxt = rk4(h, j, dt)
            if switched(nxt, j):
                lo, hi = 0.0, dt
                for _ in range(60):
                    mid = (lo + hi) / 2
                    lo, hi = (lo, mid) if switched(rk4(h, j, mid), j) else (mid, hi)
                dt = hi
                nxt = rk4(h, j, dt)
            h, t = nxt, t + dt
        out.append(h)
    return us, np.array(out)


def modular(values, weights, capacity=None):
    return Instance(weights, capacity or float(np.sum(weights)), ModularOracle(values))


def test_single_block_closed_form():
    inst = modular([0.6, 0.4], [0.5, 0.5])
    h = build_bounding(inst, Partition((frozenset({0, 1}),)))
    assert h.k == 1 and h.D[0] == 0 and h.D[1] == math.inf
    u = np.linspace(0, 5, 100)
    assert np.max(np.abs(h(u) - (1 - np.exp(-u)))) <= 1e-12
    assert h(1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert h(0.0) == pytest.approx(0.0, abs=1e-15)


def test_single_block_with_offset():
    table = {(): 0.3, (0,): 1.1}
    inst = Instance([2.0], 2.0, TableOracle(1, table))
    h = build_bounding(inst, Partition.singletons([0]))
    u = np.linspace(0, 10, 100)
    expect = 1.1 * (1 - np.exp(-u / 2)) + 0.3 * np.exp(-u / 2)
    assert np.max(np.abs(h(u) - expect)) <= 1e-12
    assert h(0.0) == pytest.approx(0.3, abs=1e-15)


def test_equal_rates_collapse_first_segment():
    inst = modular([1.0, 2.0], [1.0, 2.0])
    h = build_bounding(inst, Partition.singletons([0, 1]))
    assert h.D[1] == 0.0
    u = np.linspace(0, 4, 50)
    assert np.max(np.abs(h(u) - 3 * (1 - np.exp(-u / 3)))) <= 1e-12


def test_zero_rate_breakpoint_is_infinite():
    f = TableOracle(2, {(): 0, (0,): 1, (1,): 0.5, (0, 1): 1})  # element 1 adds nothing after 0
    inst = Instance([1.0, 1.0], 2.0, f)
    h = build_bounding(inst, Partition.singletons([0, 1]))
    assert h.rates.tolist() == [1.0, 0.0]
    assert math.isinf(h.D[1])
    assert h(50.0) == pytest.approx(1.0, abs=1e-12)
    assert h(3.0) < 1.0


def test_two_blocks_hand_values():
    # r = (2, 1), w = (1, 1): D_1 = 1 * ln 2
    inst = modular([2.0, 1.0], [1.0, 1.0])
    h = build_bounding(inst, Partition.singletons([0, 1]))
    assert h.D[1] == pytest.approx(math.log(2), abs=1e-15)
    assert h(0.25) == pytest.approx(2 - 2 * math.exp(-0.25), abs=1e-15)
    u = math.log(2) + 0.5
    assert h(u) == pytest.approx(3 - 1 * 2 * math.exp(-0.5 / 2), abs=1e-15)
    assert continuity_gaps(h)[0][1] <= 1e-15


@pytest.mark.parametrize("seed", range(25))
def test_matches_ode_integration(seed):
    inst = coverage_instance(8, 300 + seed)
    X = sorted(np.random.default_rng(seed).choice(8, 4, replace=False).tolist())
    inst = Instance(inst.weights, max(inst.capacity, inst.weight(X)), inst.oracle)
    h = build_bounding(inst, build_partition_auto(inst, X))
    u_end = 3 * float(h.w_prefix[-1]) + (float(h.finite_breakpoints.max()) if h.k > 1 else 0)
    us, ref = ode_bounding(h.f_prefix, h.w_prefix, h.rates, h.f_empty, u_end)
    assert np.max(np.abs(h(us) - ref)) <= 1e-6


@pytest.mark.parametrize("seed", range(100))
def test_structure_on_random_partitions(seed):
    inst = coverage_instance(10, 400 + seed)
    rng = np.random.default_rng(seed)
    X = rng.choice(10, int(rng.integers(1, 6)), replace=False).tolist()
    inst = Instance(inst.weights, max(inst.capacity, inst.weight(X)), inst.oracle)
    part = build_partition_auto(inst, X)
    h = build_bounding(inst, part)
    assert np.all(np.diff(h.rates) <= 1e-9)
    assert np.all(h.D[1:] >= h.D[:-1])
    assert all(gap <= 1e-9 for _, gap in continuity_gaps(h))
    u = np.linspace(0, 4 * float(h.w_prefix[-1]) + 1, 2000)
    vals = h(u)
    assert np.all(np.diff(vals) >= -1e-9)
    if h.rates[-1] > 0:
        near = u[u <= h.D[h.k - 1] + 10 * h.w_prefix[-1]]  # beyond this exp() underflows to 0
        assert np.all(h(near) < h.f_prefix[-1])
    assert h(0.0) == pytest.approx(h.f_prefix[0] - h.rates[0] * h.w_prefix[0], abs=1e-12)


def test_modular_auto_partition_sorted_by_density():
    inst = modular([3.0, 1.0, 4.0, 1.0], [1.0, 1.0, 2.0, 0.5])
    assert [min(b) for b in build_partition_auto(inst, range(4)).blocks] == [0, 2, 3, 1]
    single = build_partition_auto(inst, [2])
    assert single.k == 1
    assert build_bounding(inst, single).rates[0] == 2.0


def test_partition_errors():
    inst = modular([1, 1], [1, 1], capacity=1.0)
    with pytest.raises(ValueError):
        build_partition_auto(inst, [])
    with pytest.raises(InvalidPartitionError):
        build_partition_auto(inst, [0, 1])
    with pytest.raises(InvalidPartitionError):
        Partition((frozenset({0}), frozenset({0, 1})))
    with pytest.raises(InvalidPartitionError):
        Partition((frozenset(),))


def test_increasing_rates_rejected():
    inst = modular([1.0, 2.0], [1.0, 1.0])
    with pytest.raises(InvalidPartitionError):
        build_bounding(inst, Partition.singletons([0, 1]))


def test_two_block_partition_examples():
    inst = modular([6.0, 1.0, 5.0], [3.0, 1.0, 2.0], capacity=6.0)
    p = build_partition_two_block(inst, (), {0, 1})
    assert p.blocks == (frozenset({0}), frozenset({1}))
    assert build_partition_two_block(inst, {1}, {0, 1}).k == 1
    with pytest.raises(ValueError):
        build_partition_two_block(inst, {0, 1}, {0, 1})


@pytest.mark.parametrize("seed", range(40))
def test_two_block_order_on_coverage(seed):
    inst = coverage_instance(9, 500 + seed)
    rng = np.random.default_rng(seed)
    G = rng.choice(9, 2, replace=False).tolist()
    Y = rng.choice(9, 5, replace=False).tolist()
    if not set(Y) - set(G):
        return
    p = build_partition_two_block(inst, G, Y)
    fG = contract(inst.oracle, G)
    heaviest = max(set(Y) - set(G), key=lambda e: (inst.weights[e], -e))
    assert frozenset({heaviest}) in p.blocks
    if p.k == 2:
        d = [fG.evaluate(b) / inst.weight(b) for b in p.blocks]
        assert d[0] >= d[1]


@pytest.mark.parametrize("seed", range(30))
def test_self_consistent_dominance(seed):
    inst = coverage_instance(12, 600 + seed)
    tr = greedy(inst)
    part = Partition.singletons(tr.order)
    rep = verify_dominance(inst, tr, part)
    assert rep.ok
    assert rep.min_slack >= -1e-9


def test_degenerate_domain():
    # the only X element is as heavy as the knapsack: W - max w(e) < 0 cannot happen for feasible X,
    # so shrink the domain to zero and check the report is still produced
    inst = modular([1.0, 1.0], [1.0, 1.0], capacity=1.0)
    tr = greedy(inst)
    rep = verify_dominance(inst, tr, Partition.singletons([1]))
    assert rep.W_max == 0.0 and rep.ok


def test_report_json_fields(counterexample):
    tr = greedy(counterexample)
    rep = verify_dominance(counterexample, tr, build_partition_auto(counterexample, [0, 1]), grid_points=50)
    js = rep.to_json()
    assert set(js) >= {"W_max", "min_slack", "argmin_u", "grid_points", "ok"}
    assert js["grid_points"] == 50
    assert js["W_max"] == 8.0
