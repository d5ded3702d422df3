import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from app.errors import InstanceTooLarge, WrongStructure
from app.models.schemas import GroupStructure
from app.services.exact_oracle import solve_subset_dp
from app.services.generator import generate_instance
from app.services.kmpca_dp import (
    build_grouped,
    check_kmpca_guard,
    fill_1mpca_table,
    fill_kmpca_table,
    solve_1mpca,
    solve_kmpca,
)
from app.services.recognition import recognize
from tests.conftest import make_instance


def grouped_of(instance):
    return build_grouped(instance, recognize(instance))


def test_one_user_three_channels():
    report = solve_1mpca(grouped_of(make_instance([[1.0, 1.0, 1.0]], [1.0])))
    assert report.objective == pytest.approx(3 * (2 ** (1 / 3) - 1), rel=1e-12)
    assert report.algorithm == "1mpca"


def test_forced_one_channel_each():
    report = solve_1mpca(grouped_of(make_instance([[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0])))
    assert report.objective == pytest.approx(2.0)


def test_1mpca_matches_subset_dp():
    instance = make_instance([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]], [1.0, 1.0])
    assert solve_1mpca(grouped_of(instance)).objective == pytest.approx(solve_subset_dp(instance).objective, abs=1e-9)


def test_1mpca_rejects_several_groups():
    instance = make_instance([[1.0, 2.0]], [1.0])
    with pytest.raises(WrongStructure):
        solve_1mpca(grouped_of(instance))


def test_build_grouped_rejects_non_uniform_group():
    instance = make_instance([[1.0, 2.0]], [1.0])
    with pytest.raises(WrongStructure):
        build_grouped(instance, GroupStructure(group_id=(0, 0)))


@pytest.mark.parametrize("seed", range(50))
def test_one_channel_per_user_closed_form(seed):
    instance = generate_instance(5, 12, k=1, seed=seed)
    table = fill_1mpca_table(grouped_of(instance))
    gains = instance.gains[:, 0]
    for m in range(1, instance.num_users + 1):
        expected = math.fsum(math.expm1(instance.rate_targets[i] * math.log(2)) / gains[i] for i in range(m))
        assert table.values[m - 1, m] == pytest.approx(expected, rel=1e-12)


def test_kmpca_equals_1mpca_for_one_group():
    instance = generate_instance(4, 9, k=1, seed=3)
    grouped = grouped_of(instance)
    assert solve_kmpca(grouped).objective == solve_1mpca(grouped).objective


def test_two_uniform_groups():
    instance = make_instance([[1.0, 1.0, 2.0, 2.0], [1.0, 1.0, 2.0, 2.0]], [1.0, 1.0])
    report = solve_kmpca(grouped_of(instance))
    assert report.objective == pytest.approx(solve_subset_dp(instance).objective, abs=1e-9)
    assert report.details["K"] == 2


@pytest.mark.parametrize("seed", range(100))
def test_kmpca_matches_subset_dp(seed):
    rng = np.random.default_rng(1000 + seed)
    users = int(rng.integers(1, 5))
    channels = int(rng.integers(max(users, 3), 13))
    k = int(rng.integers(1, 4))
    instance = generate_instance(users, channels, k=k, seed=seed)
    assert solve_kmpca(grouped_of(instance)).objective == pytest.approx(
        solve_subset_dp(instance).objective, abs=1e-9
    )


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(300))
def test_kmpca_acceptance_sweep(seed):
    rng = np.random.default_rng(seed)
    users = int(rng.integers(1, 5))
    channels = int(rng.integers(max(users, 3), 13))
    instance = generate_instance(users, channels, k=int(rng.integers(1, 4)), seed=seed)
    assert solve_kmpca(grouped_of(instance)).objective == pytest.approx(
        solve_subset_dp(instance).objective, abs=1e-9
    )


def test_kmpca_guard():
    instance = generate_instance(2, 10, k=5, seed=1)
    with pytest.raises(InstanceTooLarge):
        check_kmpca_guard(grouped_of(instance))
    with pytest.raises(InstanceTooLarge):
        solve_kmpca(grouped_of(instance))


@hyp_settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_table_nonincreasing_in_every_axis(seed):
    instance = generate_instance(2, 6, k=2, seed=seed)
    values = fill_kmpca_table(grouped_of(instance)).values
    for user in range(values.shape[0]):
        row = values[user]
        for axis in range(row.ndim):
            later = np.take(row, range(1, row.shape[axis]), axis=axis)
            earlier = np.take(row, range(0, row.shape[axis] - 1), axis=axis)
            finite = np.isfinite(earlier)
            assert np.all(later[finite] <= earlier[finite] * (1 + 1e-12))


def test_table_infinite_without_enough_channels():
    instance = generate_instance(3, 6, k=2, seed=4)
    values = fill_kmpca_table(grouped_of(instance)).values
    sizes = grouped_of(instance).groups.group_sizes
    for h in np.ndindex(*(s + 1 for s in sizes)):
        for user in range(3):
            if sum(h) < user + 1:
                assert math.isinf(values[(user,) + h])
