import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from app.models.schemas import RateModel, SingleUserProblem
from app.services.waterfill import solve_user, waterfill, waterfill_grouped, waterfill_power_sorted
from tests.conftest import make_instance

gain_values = st.floats(min_value=0.1, max_value=10.0)
rate_values = st.floats(min_value=0.05, max_value=3.0)


def power_of(gains, rate, model=RateModel.LOG_SNR):
    return waterfill(SingleUserProblem(gains=gains, rate_target=rate, rate_model=model))


def test_single_channel():
    solution = power_of([1.0], 1.0)
    assert solution.total_power == pytest.approx(1.0)
    assert solution.active_count == 1


def test_identical_gains_split_evenly():
    g_l = 1.0 / 26.0
    solution = power_of([g_l, g_l, g_l], 1.0)
    np.testing.assert_allclose(solution.rates, [1 / 3] * 3, rtol=1e-12)
    assert solution.total_power == pytest.approx(3 * (2 ** (1 / 3) - 1) / g_l, rel=1e-12)


def test_weak_channel_left_idle():
    solution = power_of([4.0, 1.0], 1.0)
    assert solution.rates.tolist() == [1.0, 0.0]
    assert solution.total_power == pytest.approx(0.25)
    assert solution.active_count == 1


def test_rates_stay_in_input_positions():
    solution = power_of([1.0, 4.0], 1.0)
    assert solution.rates.tolist() == [0.0, 1.0]


def test_linear_uses_best_channel_lowest_index():
    solution = power_of([2.0, 3.0, 3.0], 1.5, RateModel.LINEAR)
    assert solution.rates.tolist() == [0.0, 1.5, 0.0]
    assert solution.total_power == pytest.approx(0.5)


def test_grouped_single_group_closed_form():
    assert waterfill_grouped([1.0 / 26.0], [2], 1.0) == pytest.approx(2 * (math.sqrt(2) - 1) * 26.0, rel=1e-12)
    assert waterfill_grouped([1.0], [3], 1.0) == pytest.approx(3 * (2 ** (1 / 3) - 1), rel=1e-12)


def test_grouped_two_groups_matches_expanded():
    assert waterfill_grouped([2.0, 1.0], [1, 1], 2.0) == pytest.approx(power_of([2.0, 1.0], 2.0).total_power, rel=1e-12)


def test_grouped_ignores_empty_groups():
    assert waterfill_grouped([5.0, 1.0], [0, 2], 1.0) == pytest.approx(power_of([1.0, 1.0], 1.0).total_power)
    assert waterfill_grouped([5.0], [0], 1.0) == math.inf


def test_solve_user_restricts_to_channels():
    instance = make_instance([[8.0, 1.0, 1.0]], [1.0])
    assert solve_user(instance, 0, [1, 2]).total_power == pytest.approx(power_of([1.0, 1.0], 1.0).total_power)


@hyp_settings(max_examples=300, deadline=None)
@given(gains=st.lists(gain_values, min_size=1, max_size=8), rate=rate_values)
def test_kkt_equalization(gains, rate):
    solution = power_of(gains, rate)
    rates = solution.rates
    assert np.all(rates >= 0.0)
    assert math.isclose(math.fsum(rates.tolist()), rate, rel_tol=1e-12)
    active = rates > 0.0
    level = np.exp2(rates[active]) / np.asarray(gains)[active]
    np.testing.assert_allclose(level, level[0], rtol=1e-9)
    idle = 1.0 / np.asarray(gains)[~active]
    assert np.all(idle >= level[0] * (1 - 1e-9))
    expected = math.fsum(RateModel.LOG_SNR.inverse_power(np.asarray(gains), rates).tolist())
    assert math.isclose(solution.total_power, expected, rel_tol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_seeded_problems_meet_kkt_and_pairwise_grid(seed):
    rng = np.random.default_rng(seed)
    model = RateModel.LOG_SNR
    for _ in range(100):
        n = int(rng.integers(1, 9))
        gains = np.exp(rng.uniform(np.log(0.1), np.log(10.0), n))
        rate = float(rng.uniform(0.05, 3.0))
        rates = power_of(gains, rate).rates
        active = rates > 0.0
        level = np.exp2(rates[active]) / gains[active]
        np.testing.assert_allclose(level, level[0], rtol=1e-9)
        # re-split the strongest channel's rate with every other channel, step 1e-4
        best = int(np.argmax(gains))
        for other in range(n):
            if other == best:
                continue
            pair = rates[best] + rates[other]
            split = np.linspace(0.0, pair, int(round(pair / 1e-4)) + 1)
            current = model.inverse_power(gains[best], rates[best]) + model.inverse_power(gains[other], rates[other])
            grid = model.inverse_power(gains[best], split) + model.inverse_power(gains[other], pair - split)
            assert current <= float(grid.min()) + 1e-6


@given(gains=st.lists(gain_values, min_size=1, max_size=7), extra=gain_values, rate=rate_values)
def test_adding_a_channel_never_costs_power(gains, extra, rate):
    assert power_of(gains + [extra], rate).total_power <= power_of(gains, rate).total_power * (1 + 1e-12)


@hyp_settings(max_examples=100, deadline=None)
@given(g1=gain_values, g2=gain_values, rate=rate_values)
def test_two_channels_against_grid_search(g1, g2, rate):
    r1 = np.linspace(0.0, rate, int(round(rate / 1e-4)) + 1)
    grid = RateModel.LOG_SNR.inverse_power(g1, r1) + RateModel.LOG_SNR.inverse_power(g2, rate - r1)
    assert power_of([g1, g2], rate).total_power <= float(grid.min()) + 1e-6


@hyp_settings(max_examples=20, deadline=None)
@given(
    gains=st.lists(gain_values, min_size=3, max_size=3),
    rate=st.floats(min_value=0.05, max_value=0.2),
)
def test_three_channels_against_grid_search(gains, rate):
    steps = np.linspace(0.0, rate, int(round(rate / 1e-4)) + 1)
    r1, r2 = np.meshgrid(steps, steps)
    r3 = rate - r1 - r2
    feasible = r3 >= 0.0
    model = RateModel.LOG_SNR
    grid = model.inverse_power(gains[0], r1) + model.inverse_power(gains[1], r2) \
        + model.inverse_power(gains[2], np.where(feasible, r3, 0.0))
    assert power_of(gains, rate).total_power <= float(grid[feasible].min()) + 1e-6


@given(
    groups=st.lists(st.tuples(gain_values, st.integers(min_value=1, max_value=4)), min_size=1, max_size=4),
    rate=rate_values,
)
def test_grouped_equals_expanded(groups, rate):
    expanded = [g for g, count in groups for _ in range(count)]
    grouped = waterfill_grouped([g for g, _ in groups], [c for _, c in groups], rate)
    assert math.isclose(grouped, power_of(expanded, rate).total_power, rel_tol=1e-12)


@given(gains=st.lists(gain_values, min_size=1, max_size=8), rate=rate_values)
def test_scalar_fast_path_matches(gains, rate):
    fast = waterfill_power_sorted(sorted(gains, reverse=True), rate, RateModel.LOG_SNR)
    assert math.isclose(fast, power_of(gains, rate).total_power, rel_tol=1e-12)
