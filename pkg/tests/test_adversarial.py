import numpy as np
import pytest

from msk.adversarial import (DEFAULT_EPSILON, STRUCTURE_EPSILON, AdversarialInstance, AdversarialParams,
                             ConstructionInfeasibleError, gen_adversarial, verify_adversarial)
from msk.bounding import build_partition_auto, build_partition_two_block, verify_dominance
from msk.greedy import greedy, greedy_lazy
from msk.oracle import ModularOracle, check_monotone_submodular

P = AdversarialParams()
TARGET = 1 - 2 * 0.62233 * 0.4584


@pytest.fixture(scope="module")
def coarse():
    return gen_adversarial(STRUCTURE_EPSILON, structure_only=True)


def test_parameter_values():
    assert P.f_Z == pytest.approx(0.14114, abs=1e-12)
    assert P.w_Z == pytest.approx(0.0832, abs=1e-12)
    assert P.f_X + P.f_Y + P.f_Z == pytest.approx(1.0, abs=1e-15)
    assert P.density_X == pytest.approx(0.9368, abs=5e-5)
    assert P.first_batch_length == pytest.approx(0.06319, abs=1e-5)
    assert (P.density_X - P.rho) * P.w_X == pytest.approx(0.144153928, abs=1e-9)
    assert P.target_value == pytest.approx(0.429447856, abs=1e-12)
    assert P.target_value < P.beta
    assert P.first_batch_weight_limit == pytest.approx(0.0494, abs=5e-5)
    # the closed form is 0.4090014; the rounded figure 0.40903 is not reproduced
    assert P.second_batch_weight_limit == pytest.approx(0.4090014, abs=1e-7)


def test_batch_lengths_pinned(coarse):
    eps = coarse.epsilon_eff
    assert (coarse.k2 - coarse.k1) * eps == pytest.approx(P.density_X - P.rho, abs=1e-14)
    assert (coarse.k1 - 1) * eps + coarse.ragged_length == pytest.approx(P.first_batch_length, abs=1e-14)
    assert 0 < coarse.ragged_length <= eps
    assert abs(eps - STRUCTURE_EPSILON) / STRUCTURE_EPSILON < 0.01


def test_layout(coarse):
    oracle, k1, k2 = coarse.instance.oracle, coarse.k1, coarse.k2
    sets = oracle.intervals
    assert sets[coarse.x_id].pairs == ((0.0, P.f_X),)
    assert sets[coarse.y_id].pairs == ((1.0, 1.0 + P.f_Y),)
    assert sets[coarse.z_id].pairs == ((2.0, 2.0 + P.f_Z),)
    eps = coarse.epsilon_eff
    for j in range(k1 - 1):
        assert sets[j].measure == pytest.approx(eps, abs=1e-15)
    for j in range(k1, k2):
        pieces = sets[j].pairs
        assert len(pieces) == 3
        lens = [b - a for a, b in pieces]
        assert lens == pytest.approx([eps * P.w_X, eps * P.w_Y, eps * P.w_Z], abs=1e-15)
    # decoys are pairwise disjoint and covered by X, Y, Z
    assert oracle.evaluate(range(k2)) == pytest.approx(sum(s.measure for s in sets[:k2]), abs=1e-12)
    assert oracle.evaluate(range(coarse.instance.n)) == pytest.approx(1.0, abs=1e-12)
    assert coarse.instance.weight([coarse.x_id, coarse.y_id, coarse.z_id]) == pytest.approx(1.0, abs=1e-15)


def test_weight_formulas(coarse):
    w, eps, k1, k2 = coarse.instance.weights, coarse.epsilon_eff, coarse.k1, coarse.k2
    j = np.arange(k1 - 1)
    assert np.allclose(w[: k1 - 1], eps * P.w_Z / (P.f_Z - eps * j), rtol=1e-12, atol=0)
    t = np.arange(k2 - k1)
    assert np.allclose(w[k1:k2], eps * P.w_X / (P.f_X - eps * P.w_X * t), rtol=1e-12, atol=0)


def test_batch_weights_against_limits(coarse):
    assert coarse.first_batch_weight == pytest.approx(P.first_batch_weight_limit, abs=5e-4)
    assert coarse.second_batch_weight <= P.second_batch_weight_limit


def test_structure_run(coarse):
    assert coarse.instance.n == coarse.k2 + 3
    rep = verify_adversarial(coarse)
    assert rep.trace_match
    assert rep.density_error <= 1e-9 and rep.densities_ok
    assert rep.opt_value == pytest.approx(1.0, abs=1e-12)
    assert rep.full_value == pytest.approx(1.0, abs=1e-12)


def test_structure_run_plain_greedy_agrees(coarse):
    assert greedy(coarse.instance) == greedy_lazy(coarse.instance)


def test_coarse_epsilon_fails_lockout():
    with pytest.raises(ConstructionInfeasibleError) as exc:
        gen_adversarial(STRUCTURE_EPSILON)
    assert exc.value.inequality == "lockout"


def test_margin_too_thin_at_1e5():
    # the lock-out margin is ~4.6e-6, so epsilon = 1e-5 cannot validate
    with pytest.raises(ConstructionInfeasibleError) as exc:
        gen_adversarial(1e-5)
    assert exc.value.inequality == "lockout"


def test_huge_epsilon_rejected():
    with pytest.raises(ConstructionInfeasibleError):
        gen_adversarial(1.0, structure_only=True)
    with pytest.raises(ValueError):
        gen_adversarial(0.0)


def test_metadata_round_trip(coarse):
    meta = coarse.metadata()
    back = AdversarialInstance.from_metadata(coarse.instance, meta)
    assert (back.k1, back.k2, back.epsilon_eff, back.ragged_length) == (
        coarse.k1, coarse.k2, coarse.epsilon_eff, coarse.ragged_length)
    assert back.params == coarse.params and back.structure_only


@pytest.mark.parametrize("seed", range(10))
def test_sub_ground_sets_submodular(coarse, seed):
    rng = np.random.default_rng(seed)
    ids = sorted(rng.choice(coarse.instance.n, 10, replace=False).tolist())
    if seed < 3:
        ids = sorted(set(ids[:7]) | {coarse.x_id, coarse.y_id, coarse.z_id})
    sub = type(coarse.instance.oracle)([coarse.instance.oracle.intervals[i] for i in ids])
    assert check_monotone_submodular(sub).ok


def test_dominance_on_construction(coarse):
    tr = greedy_lazy(coarse.instance)
    X = [coarse.x_id, coarse.y_id, coarse.z_id]
    for part in (build_partition_auto(coarse.instance, X), build_partition_two_block(coarse.instance, (), X)):
        rep = verify_dominance(coarse.instance, tr, part)
        assert rep.ok and rep.min_slack >= 0


def test_full_run(adversarial_full):
    inst, rep, _ = adversarial_full
    assert inst.epsilon == DEFAULT_EPSILON
    assert rep.trace_match and rep.xy_rejected and rep.densities_ok
    assert rep.gps_value == pytest.approx(TARGET, abs=1e-6)
    assert rep.opt_value == pytest.approx(1.0, abs=1e-12)
    assert rep.ratio < 0.42945
    assert inst.checks["lockout"][0]
    assert max(inst.instance.oracle.evaluate((e,)) for e in (inst.x_id, inst.y_id, inst.z_id)) < P.beta


def test_full_first_batch_close_to_limit(adversarial_full):
    inst, _, _ = adversarial_full
    assert inst.first_batch_weight == pytest.approx(0.0494, abs=5e-5)
    assert inst.second_batch_weight <= P.second_batch_weight_limit


def test_report_divergence_on_wrong_trace(coarse):
    rep = verify_adversarial(coarse, trace=greedy(type(coarse.instance)(
        coarse.instance.weights, coarse.instance.capacity, ModularOracle(np.ones(coarse.instance.n)))))
    assert not rep.trace_match
    assert rep.first_divergence is not None
