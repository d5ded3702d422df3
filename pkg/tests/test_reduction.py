import math

import numpy as np
import pytest

from app.errors import InstanceTooLarge, MalformedCnf, NotThreeSat, OccurrenceBoundViolated, ParseError
from app.models.sat import ChannelKind, CnfFormula, ReductionMode, UserKind
from app.services.exact_oracle import build_allocation, solve_consecutive_exact, solve_subset_dp
from app.services.feasibility import evaluate
from app.services.reduction import (
    attach_dummy_channels,
    build_appendix_a,
    build_appendix_b,
    build_reduction,
    canonicalize_optimum,
    check_derivative_bounds,
    check_gadget_lemmas,
    clause_power_lower_bound,
    decide_sat,
    decide_sat_detailed,
    enumerate_cnfs,
    gadget_constants,
    literal_user_power,
    power_constants,
    sat_threshold,
    satisfies_blocks,
    structured_optimum,
    truth_table_satisfiable,
)
from app.utils.dimacs import format_dimacs, parse_dimacs

CUBE = 2 ** (1 / 3) - 1


def test_gadget_constants():
    constants = gadget_constants(2)
    assert constants.g_s == constants.g_c == 1.0
    assert constants.g_a == pytest.approx(1 / 1.9)
    assert constants.g_l == pytest.approx(1 / (1.9 * 26))
    assert constants.g_eps == pytest.approx(1 / 106)


def test_plain_gadget_sizes(sat_cnf):
    instance, layout = build_appendix_a(sat_cnf)
    assert (instance.num_users, instance.num_channels) == (3, 8)
    assert np.all(instance.rate_targets == 1.0)
    assert layout.mode is ReductionMode.A


def test_plain_gadget_two_variables():
    cnf = CnfFormula(num_vars=2, clauses=((1, -1, 2),))
    instance, _layout = build_appendix_a(cnf)
    assert (instance.num_users, instance.num_channels) == (5, 15)


@pytest.mark.parametrize("cnf", list(enumerate_cnfs(1, 2)) + [CnfFormula(2, ((1, 2, -2), (-1, -1, 2)))])
def test_every_user_has_four_valid_channels(cnf):
    instance, layout = build_appendix_a(cnf)
    valid = (instance.gains > layout.constants.g_eps).sum(axis=1)
    assert valid.tolist() == [4] * instance.num_users


def test_gains_follow_the_roles():
    cnf = CnfFormula(num_vars=1, clauses=((1, 1, -1),))
    instance, layout = build_appendix_a(cnf)
    c = layout.constants
    z_user, clause_user = layout.literal_user(1, True), layout.clause_user(0)
    assert instance.gains[z_user, layout.super_channel(1)] == c.g_s
    assert all(instance.gains[z_user, n] == c.g_l for n in layout.literal_channels(1, True))
    z, z1, _z2 = layout.literal_channels(1, True)
    assert layout.occurrence_channels[0] == (z, z1, layout.literal_channels(1, False)[0])
    assert instance.gains[clause_user, layout.aux_channel(0)] == c.g_a


def test_padded_gadget_layout(sat_cnf):
    instance, layout, blocks = build_appendix_b(sat_cnf)
    assert (instance.num_users, instance.num_channels) == (3, 10)
    assert [role.label for role in layout.channel_roles] == [
        "S1", "D1", "D1", "z1", "z1'", "z1''", "~z1", "~z1'", "~z1''", "A1",
    ]
    assert blocks == (3, 3, 1)
    dummies = [n for n, role in enumerate(layout.channel_roles) if role.kind is ChannelKind.DUMMY]
    assert np.all(instance.gains[:, dummies] == layout.constants.g_eps)


def test_reduction_metadata(sat_cnf):
    instance, _layout, _blocks = build_reduction(sat_cnf, ReductionMode.B)
    assert instance.metadata["reduction"] == {"mode": "b", "block_sizes": [3, 3, 1]}


def test_thresholds():
    assert sat_threshold(1, 1) == pytest.approx(2 + 78 * CUBE, rel=1e-12)
    assert sat_threshold(1, 1) == pytest.approx(22.273840, abs=1e-5)
    assert sat_threshold(1, 2) == pytest.approx(3 + 78 * CUBE * 1.9, rel=1e-12)
    assert sat_threshold(1, 2) == pytest.approx(41.520296, abs=1e-5)
    # affine in w
    assert sat_threshold(2, 3) - sat_threshold(2, 2) == pytest.approx(sat_threshold(2, 2) - sat_threshold(2, 1))


def test_power_constant_chain():
    for w in range(1, 20):
        constants = gadget_constants(w)
        f1, f2, f3 = power_constants(constants)
        assert f1 > f2 > f3
        assert f2 - f3 > 0.04 / constants.g_l > 1 / constants.g_a
        assert check_derivative_bounds(w)
    f1, f2, f3 = power_constants(gadget_constants(1))
    assert (f2 - f3) * gadget_constants(1).g_l == pytest.approx(0.04867, abs=1e-5)


def test_clause_power_lower_bound_exceeds_w():
    assert clause_power_lower_bound(1) == pytest.approx(1.0)
    for w in range(2, 30):
        assert clause_power_lower_bound(w) > w


def test_decide_fixtures(sat_cnf, unsat_cnf):
    assert decide_sat(sat_cnf)
    assert not decide_sat(unsat_cnf)


def test_padded_mode_agrees(sat_cnf, unsat_cnf):
    assert decide_sat(sat_cnf, ReductionMode.B)
    assert not decide_sat(unsat_cnf, ReductionMode.B)


def test_unsat_gap_is_wide(unsat_cnf):
    for mode in ReductionMode:
        assert decide_sat_detailed(unsat_cnf, mode).gap > 0.09


def test_sat_optimum_contains_literal_constant(sat_cnf):
    instance, layout = build_appendix_a(sat_cnf)
    report = solve_subset_dp(instance)
    literal = math.fsum(
        report.allocation.powers[n]
        for user in layout.users_of_kind(UserKind.LITERAL)
        for n in report.allocation.channels_of(user)
    )
    assert literal == pytest.approx(1 + 78 * CUBE * 1.0, rel=1e-9)


@pytest.mark.parametrize("w", [1, 2])
def test_decisions_match_truth_table(w):
    for cnf in enumerate_cnfs(1, w, require_every_literal=False):
        truth = truth_table_satisfiable(cnf)
        assert decide_sat(cnf, ReductionMode.A) == truth
        assert decide_sat(cnf, ReductionMode.B) == truth


@pytest.mark.parametrize("w", [1, 2])
def test_structured_optimum_equals_oracle(w):
    for cnf in enumerate_cnfs(1, w, require_every_literal=False):
        instance, _layout = build_appendix_a(cnf)
        structured = structured_optimum(cnf)
        assert structured.objective == pytest.approx(solve_subset_dp(instance).objective, abs=1e-9)
        assert structured.literal_power == pytest.approx(literal_user_power(1, w), rel=1e-9)
        assert cnf.satisfied_by(structured.assignment) == truth_table_satisfiable(cnf)


def test_lemma_checks_pass_on_satisfiable_optimum(sat_cnf):
    instance, layout = build_appendix_a(sat_cnf)
    canonical = canonicalize_optimum(instance, layout, solve_subset_dp(instance).allocation)
    report = check_gadget_lemmas(instance, layout, canonical)
    assert report.passed, report.to_dict()


def test_lemma_checks_flag_only_clause_bound_when_unsatisfiable(unsat_cnf):
    instance, layout = build_appendix_a(unsat_cnf)
    report = check_gadget_lemmas(instance, layout, structured_optimum(unsat_cnf).allocation)
    assert report.failed() == ["clause_user_power_bound"]


def test_canonicalize_detaches_idle_channels():
    cnf = CnfFormula(num_vars=1, clauses=((1, 1, -1),))
    instance, layout = build_appendix_a(cnf)
    z_user = layout.literal_user(1, True)
    # the super-channel alone is optimal, the strongest literal channel then idles
    allocation = build_allocation(instance, {
        z_user: [layout.super_channel(1), layout.literal_channels(1, True)[2]],
        layout.literal_user(1, False): list(layout.literal_channels(1, False)),
        layout.clause_user(0): [layout.aux_channel(0)],
    })
    idle = layout.literal_channels(1, True)[2]
    assert allocation.channel_owner[idle] == z_user
    canonical = canonicalize_optimum(instance, layout, allocation)
    assert canonical.channel_owner[idle] is None
    assert canonical.total_power == allocation.total_power
    assert canonicalize_optimum(instance, layout, canonical).channel_owner == canonical.channel_owner
    evaluate(instance, canonical)


def test_dummy_channels_complete_the_blocks(sat_cnf):
    instance, layout, blocks = build_appendix_b(sat_cnf)
    relaxed = build_allocation(instance, {
        layout.literal_user(1, True): [layout.super_channel(1)],
        layout.literal_user(1, False): list(layout.literal_channels(1, False)),
        layout.clause_user(0): [layout.literal_channels(1, True)[0]],
    })
    assert not satisfies_blocks(relaxed, blocks)
    padded = attach_dummy_channels(instance, layout, relaxed)
    assert satisfies_blocks(padded, blocks)
    assert evaluate(instance, padded) == pytest.approx(relaxed.total_power)
    assert padded.total_power == pytest.approx(solve_consecutive_exact(instance, blocks).objective, abs=1e-9)


def test_parse_dimacs():
    cnf = parse_dimacs(b"p cnf 1 1\n1 1 -1 0\n")
    assert cnf == CnfFormula(num_vars=1, clauses=((1, 1, -1),))
    assert parse_dimacs(format_dimacs(cnf)) == cnf


def test_parse_dimacs_comments_and_wrapped_clauses():
    text = "c example\np cnf 2 2\n1 -2\n 2 0 -1 -1 2 0\n"
    assert parse_dimacs(text).clauses == ((1, -2, 2), (-1, -1, 2))


def test_parse_dimacs_errors():
    with pytest.raises(NotThreeSat):
        parse_dimacs("p cnf 1 2\n1 -1 0\n1 1 -1 0\n")
    with pytest.raises(OccurrenceBoundViolated) as info:
        parse_dimacs("p cnf 1 2\n1 1 -1 0\n1 1 -1 0\n")
    assert info.value.literal == 1
    with pytest.raises(ParseError):
        parse_dimacs("1 1 -1 0\n")
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 1 1\n1 x -1 0\n")
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 1 2\n1 1 -1 0\n")
    with pytest.raises(MalformedCnf):
        parse_dimacs("p cnf 1 1\n1 2 -1 0\n")


def test_enumerate_cnfs_counts():
    assert len(list(enumerate_cnfs(1, 1))) == 2
    assert len(list(enumerate_cnfs(1, 1, require_every_literal=False))) == 4
    assert list(enumerate_cnfs(2, 1)) == []


def test_truth_table():
    assert truth_table_satisfiable(CnfFormula(1, ((1, 1, -1),)))
    assert not truth_table_satisfiable(CnfFormula(1, ((1, 1, 1), (-1, -1, -1))))
    with pytest.raises(InstanceTooLarge):
        truth_table_satisfiable(CnfFormula(7, ((1, 2, 3),)))


@pytest.mark.slow
def test_two_variable_single_clause_decisions():
    for cnf in enumerate_cnfs(2, 1, require_every_literal=False):
        assert decide_sat(cnf, ReductionMode.A) == truth_table_satisfiable(cnf)


@pytest.mark.slow
def test_two_variable_structured_optimum():
    cnf = CnfFormula(num_vars=2, clauses=((1, 2, -1), (-2, -1, 2)))
    instance, _layout = build_appendix_a(cnf)
    assert structured_optimum(cnf).objective == pytest.approx(solve_subset_dp(instance).objective, abs=1e-9)
