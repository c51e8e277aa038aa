import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infogain_prolog.bandit import (
    ArmStats,
    BanditRegistry,
    BanditState,
    record_take,
    select_arm,
    ucb_value,
    update_arm,
)
from infogain_prolog.terms import PredicateIndicator

C = math.sqrt(2)

# 50-digit evaluations of mean + sqrt(2 ln N / n), rounded to double.
DEADEND_1E8 = 0.00060697085175405854
EX2 = (0.0052567119111279739, 1.1662318264250101876)
EX3 = (1.2049690276583788061, 1.9763586678760644003)
INFORMATIVE_145205 = 1.0159292069323612853


def arm(i, mean, plays):
    return ArmStats(i, plays, mean * plays)


def closed_form(mean, n, total, c=C):
    return mean + c * math.sqrt(math.log(total) / n)


def test_deadend_weight_at_full_scale():
    v = ucb_value(arm(0, 0.0, 10**8), 10**8)
    assert abs(v - closed_form(0.0, 10**8, 10**8)) < 1e-12
    assert abs(v - DEADEND_1E8) < 1e-12


def test_untried_arm_is_infinite():
    assert ucb_value(ArmStats(0), 10) == math.inf


def test_informative_weight_regime():
    total = 10**8 + 145205
    v = ucb_value(arm(0, 1.0, 145205), total)
    assert abs(v - closed_form(1.0, 145205, total)) < 1e-12
    assert abs(v - INFORMATIVE_145205) < 1e-12


def test_fresh_state_picks_arm_zero():
    assert select_arm(BanditState.fresh(3)) == 0


def test_worked_example_many_plays_vs_good_mean():
    st_ = BanditState([arm(0, 0.0, 10**6), arm(1, 1.0, 10**3)], total_plays=10**6 + 10**3)
    vals = [ucb_value(a, st_.total_plays) for a in st_.arms]
    for got, want in zip(vals, EX2):
        assert abs(got - want) < 1e-12
    assert select_arm(st_) == 1


def test_worked_example_small_counts():
    st_ = BanditState([arm(0, 0.5, 10), arm(1, 0.4, 2)], total_plays=12)
    vals = [ucb_value(a, 12) for a in st_.arms]
    for got, want in zip(vals, EX3):
        assert abs(got - want) < 1e-12
    assert select_arm(st_) == 1


def test_untried_arm_has_priority():
    st_ = BanditState([arm(0, 5.0, 1), ArmStats(1), ArmStats(2)], total_plays=1)
    assert select_arm(st_) == 1
    assert select_arm(st_, allowed={2, 0}) == 2


def test_ties_go_to_lowest_index():
    st_ = BanditState([arm(0, 0.5, 4), arm(1, 0.5, 4)], total_plays=8)
    assert select_arm(st_) == 0


def test_allowed_mask():
    st_ = BanditState([arm(0, 2.0, 5), arm(1, 0.0, 5)], total_plays=10)
    assert select_arm(st_, allowed=[1]) == 1
    with pytest.raises(ValueError):
        select_arm(st_, allowed=[])


def test_update_examples():
    st_ = BanditState.fresh(2)
    update_arm(st_, 1, 0.0, 10**8)
    assert st_.arms[1].plays == 10**8 and st_.arms[1].mean == 0.0
    st_ = BanditState.fresh(1)
    update_arm(st_, 0, 0.0, 1)
    assert st_.arms[0].plays == 1 and st_.arms[0].mean == 0.0
    update_arm(st_, 0, 1.0, 1)
    assert st_.arms[0].mean == 0.5


def test_negative_effort_rejected():
    with pytest.raises(ValueError):
        update_arm(BanditState.fresh(1), 0, 0.0, -1)


def test_ucb_rejects_inconsistent_totals():
    with pytest.raises(ValueError):
        ucb_value(arm(0, 0.0, 10), 5)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 50), st.sampled_from([0.0, 1.0])), max_size=60))
def test_conservation_of_plays(updates):
    st_ = BanditState.fresh(4)
    for i, effort, reward in updates:
        update_arm(st_, i, reward, effort)
    assert st_.total_plays == sum(a.plays for a in st_.arms) == sum(e for _, e, _ in updates)
    for a in st_.arms:
        assert 0.0 <= a.total_reward


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10**6), st.integers(10**6, 10**9))
def test_zero_mean_value_shrinks_with_plays(n, total):
    assert ucb_value(arm(0, 0.0, n), total) < ucb_value(arm(0, 0.0, n - 1), total)


def test_registry_round_trip():
    reg = BanditRegistry()
    pi = PredicateIndicator("ancestor", 2)
    st_ = reg.get(pi, 3)
    update_arm(st_, 0, 1.0, 4)
    record_take(st_, 0)
    update_arm(st_, 1, 0.0, 100)
    back = BanditRegistry.from_export(reg.export())
    assert back.export() == reg.export()
    assert back[pi].arms[0].takes == 1
    with pytest.raises(ValueError):
        back.get(pi, 2)


def test_export_reports_ucb():
    reg = BanditRegistry()
    st_ = reg.get(PredicateIndicator("p", 1), 2)
    update_arm(st_, 0, 0.0, 10)
    [entry] = reg.export().values()
    assert entry["arms"][0]["ucb_value"] == pytest.approx(closed_form(0.0, 10, 10), abs=1e-12)
    assert entry["arms"][1]["ucb_value"] is None
