"""
3-SAT to MPCA gadget instances and the threshold decision built on them

Users: one literal user per polarity of every variable, then one clause user
per clause. Channels (plain layout): one super-channel per variable, three
literal channels per literal, one auxiliary channel per clause. A literal
user sees g_s on its variable's super-channel and g_l on its own literal
channels; a clause user sees g_c on the literal channels standing for its
literals and g_a on its auxiliary channel. Everything else is g_eps.

The padded layout adds two dummy channels per variable and orders channels
so that every literal user can be served by a block of three consecutive
channels and every clause user by a single channel.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.errors import InstanceTooLarge, MalformedCnf
from app.models.sat import (
    MAX_LITERAL_OCCURRENCES,
    ChannelKind,
    ChannelRole,
    CnfFormula,
    GadgetConstants,
    ReductionLayout,
    ReductionMode,
    UserKind,
    UserRole,
)
from app.models.schemas import Allocation, MpcaInstance, RateModel, SolveReport
from app.services.exact_oracle import build_allocation, solve_consecutive_exact, solve_subset_dp
from app.services.feasibility import evaluate

logger = logging.getLogger(__name__)

CUBE_ROOT_GAP = 2.0 ** (1.0 / 3.0) - 1.0


def gadget_constants(num_clauses: int) -> GadgetConstants:
    if num_clauses < 1:
        raise MalformedCnf("need at least one clause")
    return GadgetConstants.for_clauses(num_clauses)


def literal_user_power(num_vars: int, num_clauses: int) -> float:
    """Power of all literal users in a structured solution"""
    return num_vars + 78.0 * num_vars * CUBE_ROOT_GAP * (0.9 * num_clauses + 0.1)


def sat_threshold(num_vars: int, num_clauses: int) -> float:
    if num_vars < 1 or num_clauses < 1:
        raise ValueError("v and w must be positive")
    return literal_user_power(num_vars, num_clauses) + num_clauses


def clause_power_lower_bound(num_clauses: int) -> float:
    """Least clause-user power when at least one clause is left unsatisfied"""
    w = float(num_clauses)
    return 4.0 * (w - 1.0) * (2.0 ** 0.25 - 1.0) + (0.9 * w + 0.1)


def _channel_roles(num_vars: int, num_clauses: int, mode: ReductionMode) -> List[ChannelRole]:
    literals = [
        ChannelRole(ChannelKind.LITERAL, var=var, positive=positive, copy=copy)
        for var in range(1, num_vars + 1)
        for positive in (True, False)
        for copy in range(MAX_LITERAL_OCCURRENCES)
    ]
    aux = [ChannelRole(ChannelKind.AUXILIARY, clause=c) for c in range(num_clauses)]
    if mode is ReductionMode.A:
        supers = [ChannelRole(ChannelKind.SUPER, var=var) for var in range(1, num_vars + 1)]
    else:
        supers = []
        for var in range(1, num_vars + 1):
            supers.append(ChannelRole(ChannelKind.SUPER, var=var))
            supers.extend(ChannelRole(ChannelKind.DUMMY, var=var, copy=copy) for copy in range(2))
    return supers + literals + aux


def _build(cnf: CnfFormula, mode: ReductionMode) -> Tuple[MpcaInstance, ReductionLayout]:
    cnf.check(require_every_literal=False)
    v, w = cnf.num_vars, cnf.num_clauses
    constants = gadget_constants(w)

    user_roles = [
        UserRole(UserKind.LITERAL, var=var, positive=positive)
        for var in range(1, v + 1)
        for positive in (True, False)
    ] + [UserRole(UserKind.CLAUSE, clause=c) for c in range(w)]
    channel_roles = _channel_roles(v, w, mode)
    channel_index = {role: n for n, role in enumerate(channel_roles)}

    gains = np.full((len(user_roles), len(channel_roles)), constants.g_eps)
    for user, role in enumerate(user_roles):
        if role.kind is not UserKind.LITERAL:
            continue
        gains[user, channel_index[ChannelRole(ChannelKind.SUPER, var=role.var)]] = constants.g_s
        for copy in range(MAX_LITERAL_OCCURRENCES):
            literal = ChannelRole(ChannelKind.LITERAL, var=role.var, positive=role.positive, copy=copy)
            gains[user, channel_index[literal]] = constants.g_l

    # the t occurrences of a literal take copies 0..t-1 in clause order
    used: Dict[int, int] = {}
    occurrence_channels = []
    for c, clause in enumerate(cnf.clauses):
        user = 2 * v + c
        channels = []
        for lit in clause:
            copy = used.get(lit, 0)
            used[lit] = copy + 1
            channel = channel_index[ChannelRole(ChannelKind.LITERAL, var=abs(lit), positive=lit > 0, copy=copy)]
            gains[user, channel] = constants.g_c
            channels.append(channel)
        gains[user, channel_index[ChannelRole(ChannelKind.AUXILIARY, clause=c)]] = constants.g_a
        occurrence_channels.append(tuple(channels))

    layout = ReductionLayout(
        mode=mode,
        channel_roles=tuple(channel_roles),
        user_roles=tuple(user_roles),
        constants=constants,
        occurrence_channels=tuple(occurrence_channels),
    )
    instance = MpcaInstance(
        num_users=len(user_roles),
        num_channels=len(channel_roles),
        gains=gains,
        rate_targets=np.ones(len(user_roles)),
        rate_model=RateModel.LOG_SNR,
    )
    logger.debug(f"reduction {mode.value}: v={v}, w={w} -> M={instance.num_users}, N={instance.num_channels}")
    return instance, layout


def build_appendix_a(cnf: CnfFormula) -> Tuple[MpcaInstance, ReductionLayout]:
    """Plain gadget: M = 2v + w users, N = 7v + w channels"""
    return _build(cnf, ReductionMode.A)


def block_sizes_for(layout: ReductionLayout) -> Tuple[int, ...]:
    return tuple(3 if role.kind is UserKind.LITERAL else 1 for role in layout.user_roles)


def build_appendix_b(cnf: CnfFormula) -> Tuple[MpcaInstance, ReductionLayout, Tuple[int, ...]]:
    """Padded gadget for the consecutive restriction: N = 9v + w, blocks of 3 and 1"""
    instance, layout = _build(cnf, ReductionMode.B)
    blocks = block_sizes_for(layout)
    return instance, layout, blocks


def build_reduction(cnf: CnfFormula, mode: ReductionMode) -> Tuple[MpcaInstance, ReductionLayout, Optional[Tuple[int, ...]]]:
    """Either gadget, with its instance metadata recording how it was made"""
    mode = ReductionMode(mode)
    if mode is ReductionMode.A:
        instance, layout = build_appendix_a(cnf)
        blocks = None
    else:
        instance, layout, blocks = build_appendix_b(cnf)
    instance = instance.with_metadata(
        reduction={"mode": mode.value, "block_sizes": None if blocks is None else list(blocks)}
    )
    return instance, layout, blocks


@dataclass
class SatDecision:
    satisfiable: bool
    optimum: float
    threshold: float
    mode: ReductionMode
    report: SolveReport

    @property
    def gap(self) -> float:
        return self.optimum - self.threshold

    def to_dict(self) -> Dict:
        return {
            "answer": "SAT" if self.satisfiable else "UNSAT",
            "optimum": self.optimum,
            "threshold": self.threshold,
            "gap": self.gap,
            "mode": self.mode.value,
            "algorithm": self.report.algorithm,
        }


def solve_gadget(instance: MpcaInstance, mode: ReductionMode, blocks: Optional[Sequence[int]] = None) -> SolveReport:
    if ReductionMode(mode) is ReductionMode.A:
        return solve_subset_dp(instance)
    return solve_consecutive_exact(instance, blocks)


def decide_sat_detailed(cnf: CnfFormula, mode: ReductionMode = ReductionMode.A) -> SatDecision:
    mode = ReductionMode(mode)
    instance, _layout, blocks = build_reduction(cnf, mode)
    report = solve_gadget(instance, mode, blocks)
    threshold = sat_threshold(cnf.num_vars, cnf.num_clauses)
    decision = SatDecision(
        satisfiable=report.objective <= threshold + settings.decide_margin,
        optimum=report.objective,
        threshold=threshold,
        mode=mode,
        report=report,
    )
    logger.info(
        f"decide ({mode.value}): optimum {decision.optimum:.9f} vs threshold {threshold:.9f} "
        f"-> {'SAT' if decision.satisfiable else 'UNSAT'}"
    )
    return decision


def decide_sat(cnf: CnfFormula, mode: ReductionMode = ReductionMode.A) -> bool:
    """Optimum within the satisfiability threshold iff the formula is satisfiable"""
    return decide_sat_detailed(cnf, mode).satisfiable


def canonicalize_optimum(instance: MpcaInstance, layout: ReductionLayout, allocation: Allocation) -> Allocation:
    """Detach every zero-rate channel; the total power does not change"""
    owner = list(allocation.channel_owner)
    rates = allocation.rates.copy()
    powers = allocation.powers.copy()
    for channel, user in enumerate(owner):
        if user is not None and rates[channel] == 0.0:
            owner[channel] = None
            powers[channel] = 0.0
    return Allocation(channel_owner=owner, rates=rates, powers=powers)


@dataclass
class LemmaReport:
    checks: Dict[str, bool] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "checks": dict(self.checks), "notes": dict(self.notes)}


def power_constants(constants: GadgetConstants) -> Tuple[float, float, float]:
    """Power of a literal user spreading its unit rate over 1, 2 and 3 literal channels"""
    f1 = 1.0 / constants.g_l
    f2 = 2.0 * (math.sqrt(2.0) - 1.0) / constants.g_l
    f3 = 3.0 * CUBE_ROOT_GAP / constants.g_l
    return f1, f2, f3


def check_power_constants(constants: GadgetConstants) -> bool:
    f1, f2, f3 = power_constants(constants)
    return f1 > f2 > f3 and f2 - f3 > 0.04 / constants.g_l > 1.0 / constants.g_a


def check_derivative_bounds(num_clauses: int) -> bool:
    w = float(num_clauses)
    constants = gadget_constants(num_clauses)
    # clause users never profit from invalid channels
    clause_ok = 53.0 * w > 2.0 * (0.9 * w + 0.1)
    # literal users never profit from invalid channels
    literal_ok = 52.0 * (0.9 * w + 0.1) < 53.0 * w
    # a literal user on its super-channel never adds literal channels
    super_ok = 1.0 / constants.g_l > 2.0
    return clause_ok and literal_ok and super_ok


def check_gadget_lemmas(instance: MpcaInstance, layout: ReductionLayout, allocation: Allocation) -> LemmaReport:
    """Structural checks on a (canonical) optimum; failures are reported, not raised"""
    report = LemmaReport()
    constants = layout.constants

    invalid = [
        channel for channel, owner in enumerate(allocation.channel_owner)
        if owner is not None and allocation.rates[channel] > 0.0
        and instance.gains[owner, channel] <= constants.g_eps
    ]
    report.checks["no_invalid_channels"] = not invalid
    if invalid:
        report.notes["no_invalid_channels"] = f"positive rate on invalid channels {[c + 1 for c in invalid]}"

    mixed = []
    for user in layout.users_of_kind(UserKind.LITERAL):
        role = layout.user_roles[user]
        active = set(allocation.active_channels_of(user))
        if active != {layout.super_channel(role.var)} and active != set(layout.literal_channels(role.var, role.positive)):
            mixed.append(user)
    report.checks["literal_users_structured"] = not mixed
    if mixed:
        report.notes["literal_users_structured"] = f"users {[u + 1 for u in mixed]} mix channel kinds"

    report.checks["power_constants"] = check_power_constants(constants)
    report.checks["derivative_bounds"] = check_derivative_bounds(layout.num_clauses)

    literal_power = math.fsum(
        float(allocation.powers[channel])
        for user in layout.users_of_kind(UserKind.LITERAL)
        for channel in allocation.channels_of(user)
    )
    expected = literal_user_power(layout.num_vars, layout.num_clauses)
    report.checks["literal_user_power"] = math.isclose(literal_power, expected, rel_tol=1e-9, abs_tol=1e-9)
    report.notes["literal_user_power"] = f"{literal_power:.12g} (expected {expected:.12g})"

    clause_power = math.fsum(
        float(allocation.powers[channel])
        for user in layout.users_of_kind(UserKind.CLAUSE)
        for channel in allocation.channels_of(user)
    )
    report.checks["clause_user_power_bound"] = clause_power <= layout.num_clauses + settings.decide_margin
    report.notes["clause_user_power_bound"] = f"{clause_power:.12g} (bound {layout.num_clauses})"

    if not report.passed:
        logger.info(f"gadget checks failed: {report.failed()}")
    return report


@dataclass
class StructuredOptimum:
    objective: float
    assignment: Tuple[bool, ...]
    literal_power: float
    clause_power: float
    allocation: Allocation


def _structured_candidate(
    instance: MpcaInstance, layout: ReductionLayout, assignment: Sequence[bool]
) -> Tuple[float, float, Dict[int, List[int]]]:
    channel_sets: Dict[int, List[int]] = {}
    free: List[int] = []
    for var, value in enumerate(assignment, start=1):
        # z true: the z-user holds the super-channel, the negated user its literal channels
        channel_sets[layout.literal_user(var, value)] = [layout.super_channel(var)]
        channel_sets[layout.literal_user(var, not value)] = list(layout.literal_channels(var, not value))
        free.extend(layout.literal_channels(var, value))
    free.extend(layout.aux_channel(c) for c in range(layout.num_clauses))
    free.sort()

    clause_users = list(layout.users_of_kind(UserKind.CLAUSE))
    literal_alloc = build_allocation(instance, channel_sets)
    literal_power = literal_alloc.total_power

    sub = MpcaInstance(
        num_users=len(clause_users),
        num_channels=len(free),
        gains=instance.gains[np.ix_(clause_users, free)],
        rate_targets=instance.rate_targets[clause_users],
        rate_model=instance.rate_model,
    )
    sub_report = solve_subset_dp(sub)
    for index, user in enumerate(clause_users):
        channel_sets[user] = [free[n] for n in sub_report.allocation.channels_of(index)]
    return literal_power, sub_report.objective, channel_sets


def structured_optimum(cnf: CnfFormula) -> StructuredOptimum:
    """Best solution where each literal user takes its super-channel or all of its literal channels"""
    instance, layout = build_appendix_a(cnf)
    best: Optional[Tuple[float, Tuple[bool, ...], float, float, Dict[int, List[int]]]] = None
    for assignment in itertools.product((True, False), repeat=cnf.num_vars):
        literal_power, clause_power, channel_sets = _structured_candidate(instance, layout, assignment)
        total = literal_power + clause_power
        if best is None or total < best[0]:
            best = (total, assignment, literal_power, clause_power, channel_sets)

    total, assignment, literal_power, clause_power, channel_sets = best
    allocation = build_allocation(instance, channel_sets)
    evaluate(instance, allocation)
    return StructuredOptimum(
        objective=total,
        assignment=tuple(assignment),
        literal_power=literal_power,
        clause_power=clause_power,
        allocation=allocation,
    )


def attach_dummy_channels(instance: MpcaInstance, layout: ReductionLayout, allocation: Allocation) -> Allocation:
    """A literal user on its super-channel also takes that chunk's dummy channels at zero rate"""
    owner = list(allocation.channel_owner)
    rates = allocation.rates.copy()
    powers = allocation.powers.copy()
    for user in layout.users_of_kind(UserKind.LITERAL):
        var = layout.user_roles[user].var
        if owner[layout.super_channel(var)] != user:
            continue
        for dummy in layout.dummy_channels(var):
            if owner[dummy] is None or rates[dummy] == 0.0:
                owner[dummy] = user
                rates[dummy] = 0.0
                powers[dummy] = 0.0
    return Allocation(channel_owner=owner, rates=rates, powers=powers)


def satisfies_blocks(allocation: Allocation, block_sizes: Sequence[int]) -> bool:
    """Every user owns exactly its block size of channels, and they are consecutive"""
    for user, size in enumerate(block_sizes):
        channels = allocation.channels_of(user)
        if len(channels) != size or channels[-1] - channels[0] + 1 != size:
            return False
    return True


def truth_table_satisfiable(cnf: CnfFormula) -> bool:
    """Brute force over all 2^v assignments"""
    if cnf.num_vars > settings.truth_table_max_vars:
        raise InstanceTooLarge(f"truth table limited to v <= {settings.truth_table_max_vars}")
    return any(
        cnf.satisfied_by(assignment)
        for assignment in itertools.product((False, True), repeat=cnf.num_vars)
    )


def enumerate_cnfs(num_vars: int, num_clauses: int, require_every_literal: bool = True) -> Iterator[CnfFormula]:
    """Every formula (clauses as multisets, formula as a multiset of clauses) passing the occurrence bounds"""
    literals = [lit for var in range(1, num_vars + 1) for lit in (var, -var)]
    clauses = list(itertools.combinations_with_replacement(literals, 3))
    for chosen in itertools.combinations_with_replacement(clauses, num_clauses):
        cnf = CnfFormula(num_vars=num_vars, clauses=chosen)
        try:
            cnf.check(require_every_literal=require_every_literal)
        except MalformedCnf:
            continue
        yield cnf
