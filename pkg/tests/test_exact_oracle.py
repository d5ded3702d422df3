import math

import numpy as np
import pytest

from app.config import settings
from app.errors import DimensionMismatch, Infeasible, InstanceTooLarge
from app.services.exact_oracle import (
    solve_consecutive_exact,
    solve_enumeration,
    solve_subset_dp,
)
from app.services.feasibility import evaluate
from app.services.generator import generate_instance
from app.services.matching import solve_assignment, AssignmentProblem
from app.services.waterfill import solve_user
from tests.conftest import make_instance

UNIFORM_2X3 = 1 + 2 * (math.sqrt(2) - 1)


def test_uniform_two_users_three_channels(uniform_2x3):
    report = solve_subset_dp(uniform_2x3)
    assert report.objective == pytest.approx(UNIFORM_2X3, abs=1e-9)
    assert report.algorithm == "subset-dp"
    assert sorted(len(report.allocation.channels_of(m)) for m in range(2)) == [1, 2]


def test_enumeration_agrees_on_uniform(uniform_2x3):
    assert solve_enumeration(uniform_2x3).objective == pytest.approx(UNIFORM_2X3, abs=1e-9)


def test_single_user_collapses_to_waterfill():
    instance = make_instance([[0.3, 2.0, 1.1, 0.7]], [2.0])
    expected = solve_user(instance, 0, range(4)).total_power
    assert solve_subset_dp(instance).objective == pytest.approx(expected, rel=1e-12)
    assert solve_enumeration(instance).objective == pytest.approx(expected, rel=1e-12)


def test_report_is_audited(uniform_2x3):
    report = solve_subset_dp(uniform_2x3)
    assert evaluate(uniform_2x3, report.allocation) == pytest.approx(report.objective, rel=1e-9)
    assert report.wall_time >= 0.0
    assert len(report.instance_digest) == 64


def test_subset_dp_guard():
    instance = make_instance(np.ones((1, settings.subset_dp_max_channels + 1)), [1.0])
    with pytest.raises(InstanceTooLarge):
        solve_subset_dp(instance)


def test_enumeration_guard():
    instance = make_instance(np.ones((3, 14)), [1.0, 1.0, 1.0])
    with pytest.raises(InstanceTooLarge):
        solve_enumeration(instance)


@pytest.mark.parametrize("seed", range(40))
def test_subset_dp_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    users = int(rng.integers(1, 4))
    channels = int(rng.integers(users, 8))
    instance = generate_instance(users, channels, k=channels, seed=seed)
    assert solve_subset_dp(instance).objective == pytest.approx(solve_enumeration(instance).objective, abs=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
def test_subset_dp_matches_enumeration_sweep(seed):
    rng = np.random.default_rng(10_000 + seed)
    users = int(rng.integers(1, 4))
    channels = int(rng.integers(users, 8))
    instance = generate_instance(users, channels, k=int(rng.integers(1, channels + 1)), seed=seed)
    assert solve_subset_dp(instance).objective == pytest.approx(solve_enumeration(instance).objective, abs=1e-9)


def test_subset_dp_invariant_under_channel_permutation():
    instance = generate_instance(3, 7, k=7, seed=11)
    order = [6, 2, 0, 5, 1, 3, 4]
    a = solve_subset_dp(instance).objective
    b = solve_subset_dp(instance.permute_channels(order)).objective
    assert a == pytest.approx(b, abs=1e-9)


def test_consecutive_single_channel():
    instance = make_instance([[2.0]], [1.0])
    report = solve_consecutive_exact(instance, [1])
    assert report.objective == pytest.approx(0.5)
    assert report.details["block_sizes"] == [1]


def test_consecutive_singletons_match_assignment():
    instance = generate_instance(3, 3, k=3, seed=5)
    cost = np.array([[solve_user(instance, m, [n]).total_power for n in range(3)] for m in range(3)])
    expected = solve_assignment(AssignmentProblem(cost=cost)).total_cost
    assert solve_consecutive_exact(instance, [1, 1, 1]).objective == pytest.approx(expected, abs=1e-9)
    assert solve_subset_dp(instance).objective == pytest.approx(expected, abs=1e-9)


def test_consecutive_blocks_are_contiguous():
    instance = generate_instance(3, 8, k=8, seed=2)
    report = solve_consecutive_exact(instance, [3, 2, 1])
    for user, size in enumerate([3, 2, 1]):
        channels = report.allocation.channels_of(user)
        assert len(channels) == size
        assert channels == list(range(channels[0], channels[0] + size))


def test_consecutive_never_beats_unrestricted():
    instance = generate_instance(2, 6, k=6, seed=9)
    assert solve_consecutive_exact(instance, [3, 3]).objective >= solve_subset_dp(instance).objective - 1e-9


def test_consecutive_errors(uniform_2x3):
    with pytest.raises(Infeasible):
        solve_consecutive_exact(uniform_2x3, [2, 2])
    with pytest.raises(DimensionMismatch):
        solve_consecutive_exact(uniform_2x3, [1])
    with pytest.raises(DimensionMismatch):
        solve_consecutive_exact(uniform_2x3, [0, 1])
