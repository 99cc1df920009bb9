import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracle_games.config import Caps, CapExceeded
from oracle_games.dimensions import threshold_dimension
from oracle_games.harness.adversary import GreedyAdversary, RandomAdversary
from oracle_games.harness.generators import gen_random_class, gen_threshold_class
from oracle_games.mw import learning_rate, regret_bound, run_mw
from oracle_games.online import (
    PROPER,
    HypothesisMixture,
    LearnerConfig,
    NotRealizableError,
    PhaseState,
    completed_phases,
    flip_sets,
    improper_predict,
    lazy_mw_round,
    mixture_loss,
    phase_budget,
    phase_mistake_sets,
    pool_phase_losses,
    run_agnostic,
    run_realizable,
    total_mistakes,
    total_updates,
)
from oracle_games.oracles import HIGHEST, FiniteConceptClass, InputError, LabeledExample as E
from oracle_games.transcript import SolveTranscript

from reference import hedge_regret, realizable_reference

# two hypotheses disagreeing at x = 0: row 0 says 1, row 1 says 0
SPLIT = FiniteConceptClass([[1], [0]])


def mix(weights, pool=(0, 1)):
    return HypothesisMixture(tuple(pool), np.array(weights, dtype=float))


# --- mixture_loss / improper_predict


def test_mixture_loss_half():
    assert mixture_loss(SPLIT, HypothesisMixture.uniform([0, 1]), E(0, 1)) == 0.5


def test_mixture_loss_point_mass_consistent():
    assert mixture_loss(SPLIT, mix([1.0], pool=(0,)), E(0, 1)) == 0.0


def test_mixture_loss_linear():
    # weights (0.25, 0.75) on (wrong, right) for label 1: row 1 is wrong
    assert mixture_loss(SPLIT, mix([0.25, 0.75], pool=(1, 0)), E(0, 1)) == 0.25


def test_majority_tie_predicts_one():
    assert improper_predict(SPLIT, HypothesisMixture.uniform([0, 1]), 0) == 1


def test_majority_minority_ones():
    assert improper_predict(SPLIT, mix([0.4, 0.6]), 0) == 0


@pytest.mark.parametrize("h", [0, 1])
def test_majority_point_mass(h):
    assert improper_predict(SPLIT, mix([1.0], pool=(h,)), 0) == SPLIT.table[h, 0]


def test_mixture_rejects_bad_weights():
    with pytest.raises(InputError):
        mix([0.5, 0.6])
    with pytest.raises(InputError):
        mix([0.5, 0.5], pool=(0, 0))


# --- lazy_mw_round


def test_lazy_update_closed_form(monkeypatch):
    # pool order (wrong, right) for label 1 is (row 1, row 0); eta = ln 2
    monkeypatch.setattr(PhaseState, "eta", property(lambda self: math.log(2)))
    m = mix([0.5, 0.5], pool=(1, 0))
    state = PhaseState(1, (1, 0), update_budget=5)
    new, rec, done = lazy_mw_round(SPLIT, state, m, E(0, 1), epsilon=0.4)
    assert np.allclose(new.weights, [1 / 3, 2 / 3])
    assert rec.update and not done and state.update_count == 1


def test_lazy_no_update_below_eps():
    cls = FiniteConceptClass([[1]] * 9 + [[0]])
    m = HypothesisMixture.uniform(range(10))
    state = PhaseState(1, tuple(range(10)), update_budget=5)
    new, rec, done = lazy_mw_round(cls, state, m, E(0, 1), epsilon=0.4)
    assert rec.mixture_loss == pytest.approx(0.1)
    assert new is m and not rec.update and state.update_count == 0 and not done


def test_lazy_budget_one_finishes_phase():
    state = PhaseState(1, (0, 1), update_budget=1)
    _, rec, done = lazy_mw_round(SPLIT, state, HypothesisMixture.uniform([0, 1]), E(0, 1), epsilon=0.5)
    assert rec.update and done
    with pytest.raises(ValueError):
        lazy_mw_round(SPLIT, state, HypothesisMixture.uniform([0, 1]), E(0, 1), epsilon=0.5)


def test_phase_budget_and_rate():
    assert phase_budget(1, 0.25, 8) == 1
    assert phase_budget(2, 0.25, 8) == math.ceil(8 * math.log(2) / 0.0625)
    assert PhaseState(1, (0,), 1).eta == 0.0
    s = PhaseState(1, (0, 1, 2), phase_budget(3, 0.25, 8))
    assert s.eta == pytest.approx(math.sqrt(math.log(3) / (2 * s.update_budget)))


def test_config_validation():
    with pytest.raises(InputError):
        LearnerConfig(alpha=0.5)
    with pytest.raises(InputError):
        LearnerConfig(epsilon=0.7)
    with pytest.raises(InputError):
        LearnerConfig(mode="other")
    # improper mode ignores epsilon and compares against 1/2
    assert LearnerConfig(epsilon=0.3, alpha=0.25).threshold == 0.5
    assert LearnerConfig(epsilon=0.3, alpha=0.25, mode=PROPER).threshold == 0.3


# --- run_realizable


def test_singleton_class_never_errs():
    cls = FiniteConceptClass([[0, 1, 1, 0]])
    tr = run_realizable(cls, RandomAdversary(0, 100, seed=3))
    assert (total_mistakes(tr), completed_phases(tr), total_updates(tr)) == (0, 0, 0)
    assert len(tr.extras["phases"]) == 1


def test_t3_greedy_reference_run(t3):
    tr = run_realizable(t3, GreedyAdversary(2, 400))
    budgets = [p["budget"] for p in tr.extras["phases"]]
    # frozen from the straight-line reference in tests/reference.py
    assert total_mistakes(tr) == 102
    assert budgets == [1, 89, 141]
    assert (total_mistakes(tr), total_updates(tr), tr.extras["pool"]) == realizable_reference(t3.table, 2, 400)
    bound = 2 * 4 ** (threshold_dimension(t3).value + 1) * max(budgets)
    assert total_mistakes(tr) <= bound


def test_proper_mistakes_equal_improper_updates(t3):
    imp = run_realizable(t3, GreedyAdversary(2, 400))
    prop = run_realizable(t3, GreedyAdversary(2, 400), LearnerConfig(mode=PROPER))
    assert total_mistakes(prop) == total_updates(imp)
    assert all(r["prediction"] is None for r in prop.records)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_matches_reference_on_thresholds(n):
    cls = gen_threshold_class(n)
    for h in range(n):
        tr = run_realizable(cls, GreedyAdversary(h, 600))
        assert (total_mistakes(tr), total_updates(tr), tr.extras["pool"]) == realizable_reference(cls.table, h, 600)


def test_unrealizable_stream_names_round(t3):
    with pytest.raises(NotRealizableError) as info:
        # phase 1 has budget 1, so the oracle runs after round 1 and again later
        run_realizable(t3, [E(2, 0), E(0, 1)] + [E(1, 1)] * 200)
    assert info.value.round_index >= 1
    assert "round" in str(info.value)


def test_invalid_example_rejected(t3):
    with pytest.raises(InputError):
        run_realizable(t3, [E(5, 1)])


def test_transcript_records_and_csv_round_trip(t3):
    tr = run_realizable(t3, GreedyAdversary(2, 50))
    assert [r["round"] for r in tr.records] == list(range(1, 51))
    back = SolveTranscript.from_csv(tr.to_csv())
    assert back == tr
    assert tr.oracle_calls["consistent"] == len(tr.extras["oracle_log"])


def test_lazy_rounds_keep_mixture():
    cls = gen_threshold_class(4)
    tr = run_realizable(cls, GreedyAdversary(3, 300))
    for r in tr.records:
        assert r["update"] == (r["mixture_loss"] >= 0.5 - 1e-12)
        # improper mistakes only happen on update rounds
        if r["mistake"]:
            assert r["mixture_loss"] >= 0.5 - 1e-12


def test_phase_accounting(t3):
    tr = run_realizable(t3, GreedyAdversary(2, 400))
    sets = phase_mistake_sets(tr)
    for p in tr.extras["phases"]:
        if p["completed"]:
            assert len(sets[p["phase"]]) == p["budget"]
        else:
            assert len(sets[p["phase"]]) < p["budget"]


def _phase_loss_pattern(cls, tr, eps=0.5, alpha=0.25):
    losses, added_after, done = pool_phase_losses(cls, tr)
    for i in range(losses.shape[0]):
        for jj, j in enumerate(done):
            if added_after[i] >= j:
                assert losses[i, jj] == 0.0
            else:
                assert losses[i, jj] >= eps - alpha - 1e-9


@pytest.mark.parametrize("tie", ["lowest", HIGHEST])
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_inter_and_intra_phase_losses(n, tie):
    cls = gen_threshold_class(n)
    for h in range(n):
        tr = run_realizable(cls, GreedyAdversary(h, 800), LearnerConfig(tie_break=tie))
        _phase_loss_pattern(cls, tr)


@given(st.integers(0, 10_000), st.integers(0, 5))
def test_random_class_properties(seed, hstar):
    cls = gen_random_class(6, 5, seed)
    hstar %= cls.size
    tr = run_realizable(cls, RandomAdversary(hstar, 120, seed=seed))
    _phase_loss_pattern(cls, tr)
    tr_dim = threshold_dimension(cls).value
    assert completed_phases(tr) <= 2 * 4 ** (2 * tr_dim + 2)


# --- multiplicative weights


@given(st.integers(1, 64), st.integers(1, 300), st.integers(0, 2**31 - 1))
def test_mw_regret_bound(N, T, seed):
    losses = np.random.default_rng(seed).random((T, N))
    _, regret = run_mw(losses)
    assert regret <= regret_bound(N, T) + 1e-9


def test_mw_matches_reference_hedge():
    losses = np.random.default_rng(0).integers(0, 2, (200, 7))
    _, regret = run_mw(losses)
    assert regret == pytest.approx(hedge_regret(losses), abs=1e-9)
    assert learning_rate(1, 10) == 0.0


# --- agnostic reduction


def test_flip_set_counts():
    assert len(flip_sets(4, 1)) == 5
    assert len(flip_sets(8, 2)) == 37
    assert flip_sets(3, 0) == [()]


def test_agnostic_single_expert(t3):
    stream = [E(0, 1), E(1, 0), E(2, 1), E(0, 0)]
    tr = run_agnostic(t3, stream, 4, 0)
    assert tr.extras["n_experts"] == 1
    assert tr.extras["master_loss"] == pytest.approx(np.sum(tr.extras["expert_losses"]))


def test_agnostic_five_experts(t3):
    tr = run_agnostic(t3, [E(0, 1)] * 4, 4, 1)
    assert tr.extras["n_experts"] == 5


def test_agnostic_t8_m2_bound(t3):
    stream = [E(0, 1), E(1, 0), E(2, 1), E(0, 0), E(1, 1), E(2, 0), E(0, 1), E(1, 1)]
    tr = run_agnostic(t3, stream, 8, 2)
    ex = tr.extras
    assert ex["n_experts"] == 37
    best = min(sum(abs(int(row[x]) - y) for x, y in stream) for row in t3.table)
    assert ex["best_row_loss"] == best
    bound = 2 * math.sqrt(8 * math.log(37)) + ex["realizable_mistakes"]
    assert ex["regret"] <= bound


def test_agnostic_experts_regret_is_mw_bounded(t3):
    rng = np.random.default_rng(1)
    stream = [E(int(x), int(y)) for x, y in zip(rng.integers(0, 3, 8), rng.integers(0, 2, 8))]
    tr = run_agnostic(t3, stream, 8, 2)
    ex = tr.extras
    assert ex["master_loss"] - ex["best_expert_loss"] <= ex["mw_regret_bound"] + 1e-9


def test_agnostic_caps(t3):
    with pytest.raises(CapExceeded):
        run_agnostic(t3, [E(0, 1)] * 17, 17, 1)
    with pytest.raises(CapExceeded):
        run_agnostic(t3, [E(0, 1)] * 4, 4, 4)
    run_agnostic(t3, [E(0, 1)] * 4, 4, 4, caps=Caps(agnostic_max_flips=4))
    with pytest.raises(InputError):
        run_agnostic(t3, [E(0, 1)] * 3, 4, 1)


def test_agnostic_transcript_round_trip(t3):
    tr = run_agnostic(t3, [E(0, 1), E(2, 0), E(1, 1), E(0, 0)], 4, 1, seed=7)
    assert SolveTranscript.from_csv(tr.to_csv()) == tr
