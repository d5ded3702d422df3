"""
Differential suites: every fast algorithm against an independent oracle

Each case records the absolute objective gap between the two sides; a suite
passes when every gap is within its tolerance.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List

import numpy as np

from app.errors import BadFlags
from app.models.sat import CnfFormula, ReductionMode
from app.models.schemas import MpcaInstance, RateModel
from app.services.exact_oracle import solve_consecutive_exact, solve_enumeration, solve_subset_dp
from app.services.generator import generate_instance
from app.services.kmpca_dp import build_grouped, solve_1mpca, solve_kmpca
from app.services.matching import solve_equal_blocks, solve_linear_rate
from app.services.recognition import recognize
from app.services.reduction import decide_sat_detailed, enumerate_cnfs, truth_table_satisfiable

logger = logging.getLogger(__name__)

OBJECTIVE_TOLERANCE = 1e-9
DECISION_TOLERANCE = 1e-6

# (v, w) pairs small enough for every oracle; unused literals are allowed
REDUCTION_SIZES = ((1, 1), (1, 2), (2, 1))
UNSAT_FIXTURE = CnfFormula(num_vars=1, clauses=((1, 1, 1), (-1, -1, -1)))


@dataclass
class VerificationCase:
    name: str
    gap: float
    tolerance: float
    detail: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.gap <= self.tolerance

    def to_dict(self) -> Dict:
        return {"case": self.name, "gap": self.gap, "passed": self.passed, **self.detail}


@dataclass
class VerificationReport:
    suite: str
    cases: List[VerificationCase] = field(default_factory=list)

    @property
    def max_gap(self) -> float:
        return max((case.gap for case in self.cases), default=0.0)

    @property
    def passed(self) -> bool:
        return all(case.passed for case in self.cases)

    def to_dict(self) -> Dict:
        return {
            "suite": self.suite,
            "cases": len(self.cases),
            "max_gap": self.max_gap,
            "failed": sum(not case.passed for case in self.cases),
            "passed": self.passed,
        }


def _random_instance(seed: int, max_users: int, max_channels: int, max_groups: int = 0,
                     divisible: bool = False, rate_model: RateModel = RateModel.LOG_SNR) -> MpcaInstance:
    """Small seeded instance; max_groups=0 means every channel is its own group"""
    rng = np.random.default_rng(seed)
    users = int(rng.integers(1, max_users + 1))
    if divisible:
        channels = users * int(rng.integers(1, max_channels // users + 1))
    else:
        channels = int(rng.integers(users, max_channels + 1))
    k = channels if max_groups == 0 else int(rng.integers(1, min(max_groups, channels) + 1))
    return generate_instance(users, channels, k=k, seed=seed, rate_model=rate_model)


def _gap(a: float, b: float) -> float:
    return abs(a - b)


def oracle_cases(seeds: int) -> Iterator[VerificationCase]:
    """Subset DP against plain enumeration"""
    for seed in range(seeds):
        instance = _random_instance(seed, 3, 7)
        dp = solve_subset_dp(instance).objective
        enum = solve_enumeration(instance).objective
        yield VerificationCase(f"seed={seed}", _gap(dp, enum), OBJECTIVE_TOLERANCE,
                               {"subset_dp": dp, "enum": enum})


def kmpca_cases(seeds: int) -> Iterator[VerificationCase]:
    """K-MPCA DP (and 1-MPCA DP when K=1) against the subset DP"""
    for seed in range(seeds):
        instance = _random_instance(seed, 4, 12, max_groups=3)
        grouped = build_grouped(instance, recognize(instance))
        dp = solve_kmpca(grouped).objective
        exact = solve_subset_dp(instance).objective
        gap = _gap(dp, exact)
        detail = {"K": grouped.num_groups, "kmpca": dp, "subset_dp": exact}
        if grouped.num_groups == 1:
            one = solve_1mpca(grouped).objective
            gap = max(gap, _gap(one, exact))
            detail["1mpca"] = one
        yield VerificationCase(f"seed={seed}", gap, OBJECTIVE_TOLERANCE, detail)


def brute_force_linear(instance: MpcaInstance) -> float:
    """Cheapest injective user -> channel map under linear rates"""
    cost = instance.rate_targets[:, None] / instance.gains
    users = range(instance.num_users)
    return min(
        math.fsum(float(cost[m, n]) for m, n in zip(users, channels))
        for channels in itertools.permutations(range(instance.num_channels), instance.num_users)
    )


def matching_cases(seeds: int) -> Iterator[VerificationCase]:
    """Block matching against the consecutive DP, linear matching against brute force"""
    for seed in range(seeds):
        instance = _random_instance(seed, 3, 9, divisible=True)
        width = instance.num_channels // instance.num_users
        matched = solve_equal_blocks(instance).objective
        exact = solve_consecutive_exact(instance, [width] * instance.num_users).objective
        yield VerificationCase(f"blocks seed={seed}", _gap(matched, exact), OBJECTIVE_TOLERANCE,
                               {"block_match": matched, "consecutive": exact})

        linear = _random_instance(seed, 3, 6, rate_model=RateModel.LINEAR)
        matched = solve_linear_rate(linear).objective
        brute = brute_force_linear(linear)
        yield VerificationCase(f"linear seed={seed}", _gap(matched, brute), OBJECTIVE_TOLERANCE,
                               {"linear_match": matched, "brute_force": brute})


def reduction_cases(seeds: int = 0) -> Iterator[VerificationCase]:
    """Threshold decision in both layouts against a truth-table check"""
    formulas: List[CnfFormula] = [UNSAT_FIXTURE]
    for v, w in REDUCTION_SIZES:
        formulas.extend(cnf for cnf in enumerate_cnfs(v, w, require_every_literal=False) if cnf != UNSAT_FIXTURE)
    for cnf in formulas:
        truth = truth_table_satisfiable(cnf)
        for mode in ReductionMode:
            decision = decide_sat_detailed(cnf, mode)
            yield VerificationCase(
                f"{mode.value}:{list(map(list, cnf.clauses))}",
                0.0 if decision.satisfiable == truth else 1.0,
                DECISION_TOLERANCE,
                {"truth_table": truth, **decision.to_dict()},
            )


SUITES: Dict[str, Callable[[int], Iterator[VerificationCase]]] = {
    "oracle": oracle_cases,
    "kmpca": kmpca_cases,
    "matching": matching_cases,
    "reduction": reduction_cases,
}


def run_suite(suite: str, seeds: int = 20) -> VerificationReport:
    if suite not in SUITES:
        raise BadFlags(f"unknown suite {suite!r}, choose from {', '.join(SUITES)}")
    if seeds < 1:
        raise BadFlags("--seeds must be positive")
    report = VerificationReport(suite=suite)
    for case in SUITES[suite](seeds):
        report.cases.append(case)
        if not case.passed:
            logger.warning(f"❌ {suite} {case.name}: gap {case.gap!r}")
    logger.info(f"{'✅' if report.passed else '❌'} {suite}: {len(report.cases)} cases, max gap {report.max_gap:.3g}")
    return report

