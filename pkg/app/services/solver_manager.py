"""
Solver Manager for the MPCA suite
Routes an instance to a named algorithm or picks one automatically
"""

import logging
import time
from typing import Callable, Dict, Optional, Sequence

from app.config import settings
from app.errors import BadFlags, InstanceTooLarge, Unsupported
from app.models.schemas import GroupStructure, MpcaInstance, RateModel, SolveReport
from app.services.exact_oracle import (
    build_allocation,
    solve_consecutive_exact,
    solve_enumeration,
    solve_subset_dp,
)
from app.services.feasibility import make_report, validate
from app.services.kmpca_dp import build_grouped, check_kmpca_guard, solve_1mpca, solve_kmpca
from app.services.matching import solve_equal_blocks, solve_linear_rate
from app.services.recognition import recognize, relabel

logger = logging.getLogger(__name__)

AUTO = "auto"


def solve_single_user(instance: MpcaInstance) -> SolveReport:
    """Plain water-filling over every channel; only defined for one user"""
    started = time.perf_counter()
    validate(instance)
    if instance.num_users != 1:
        raise Unsupported(f"waterfill solves single-user instances, got M={instance.num_users}")
    allocation = build_allocation(instance, {0: range(instance.num_channels)})
    return make_report(instance, allocation, "waterfill", started)


def block_sizes_from_metadata(instance: MpcaInstance) -> Optional[Sequence[int]]:
    metadata = dict(instance.metadata or {})
    reduction = metadata.get("reduction") or {}
    return reduction.get("block_sizes") or metadata.get("block_sizes")


class SolverManager:
    """Registry of the exact algorithms plus the auto-dispatch rule"""

    def __init__(self):
        self.solvers: Dict[str, Callable[..., SolveReport]] = {
            "waterfill": self._waterfill,
            "subset-dp": self._subset_dp,
            "enum": self._enumeration,
            "consecutive": self._consecutive,
            "1mpca": self._one_mpca,
            "kmpca": self._kmpca,
            "linear-match": self._linear_match,
            "block-match": self._block_match,
        }

    @property
    def algorithms(self) -> Sequence[str]:
        return (AUTO,) + tuple(self.solvers)

    def solve(self, instance: MpcaInstance, algo: str = AUTO, blocks: Optional[Sequence[int]] = None) -> SolveReport:
        if algo == AUTO:
            algo = self.choose(instance)
        solver = self.solvers.get(algo)
        if solver is None:
            raise BadFlags(f"unknown algorithm {algo!r}, choose from {', '.join(self.algorithms)}")
        logger.info(f"🧮 Solving M={instance.num_users} N={instance.num_channels} with {algo}")
        report = solver(instance, blocks=blocks)
        logger.info(f"✅ {algo}: objective {report.objective:.9g} in {report.wall_time:.3f}s")
        return report

    def groups_of(self, instance: MpcaInstance) -> GroupStructure:
        if instance.channel_groups is not None:
            # declared ids may be any labels; renumber them 0..K-1
            return relabel(instance.channel_groups)
        return recognize(instance)

    def choose(self, instance: MpcaInstance) -> str:
        """Polynomial algorithm when the structure allows one, exact oracle otherwise"""
        validate(instance)
        if instance.rate_model is RateModel.LINEAR:
            return "linear-match"
        structure = self.groups_of(instance)
        if structure.num_groups == 1:
            return "1mpca"
        if structure.num_groups <= settings.kmpca_max_groups:
            try:
                check_kmpca_guard(build_grouped(instance, structure))
                return "kmpca"
            except InstanceTooLarge as e:
                logger.debug(f"auto: K-MPCA skipped ({e.message})")
        if instance.num_channels <= settings.subset_dp_max_channels:
            return "subset-dp"
        raise Unsupported(
            f"general MPCA is NP-hard: K={structure.num_groups} groups and N={instance.num_channels} channels "
            f"exceed every exact algorithm's limits"
        )

    def _waterfill(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        return solve_single_user(instance)

    def _subset_dp(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        return solve_subset_dp(instance)

    def _enumeration(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        return solve_enumeration(instance)

    def _consecutive(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        if blocks is None:
            blocks = block_sizes_from_metadata(instance)
        if blocks is None:
            raise BadFlags("consecutive needs --blocks (or block_sizes in the instance metadata)")
        return solve_consecutive_exact(instance, blocks)

    def _one_mpca(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        return solve_1mpca(build_grouped(instance, self.groups_of(instance)))

    def _kmpca(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        return solve_kmpca(build_grouped(instance, self.groups_of(instance)))

    def _linear_match(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        return solve_linear_rate(instance)

    def _block_match(self, instance: MpcaInstance, blocks=None) -> SolveReport:
        return solve_equal_blocks(instance)
