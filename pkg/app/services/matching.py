"""
Min-cost bipartite assignment and the two MPCA solvers built on it

solve_linear_rate: linear rate functions, each user rides a single channel.
solve_equal_blocks: N/M consecutive channels per user, blocks are fixed so
only the user-to-block pairing is decided.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.errors import DimensionMismatch, Infeasible, NotDivisible, WrongModel
from app.models.schemas import Allocation, MpcaInstance, RateModel, SolveReport
from app.services.exact_oracle import build_allocation
from app.services.feasibility import make_report, validate
from app.services.waterfill import solve_user

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AssignmentProblem:
    """Square cost matrix; entries with allowed[i, j] False are forbidden edges"""

    cost: np.ndarray
    allowed: Optional[np.ndarray] = None

    def __post_init__(self):
        cost = np.array(self.cost, dtype=np.float64)
        if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
            raise DimensionMismatch(f"assignment cost must be square, got shape {cost.shape}")
        allowed = np.ones(cost.shape, dtype=bool) if self.allowed is None else np.array(self.allowed, dtype=bool)
        if allowed.shape != cost.shape:
            raise DimensionMismatch("allowed mask does not match the cost matrix")
        if not np.all(np.isfinite(cost[allowed])):
            raise DimensionMismatch("allowed entries must have finite cost")
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "allowed", allowed)

    @property
    def size(self) -> int:
        return self.cost.shape[0]

    def masked_cost(self) -> np.ndarray:
        """Cost matrix with forbidden edges at +inf, the form linear_sum_assignment skips"""
        return np.where(self.allowed, self.cost, np.inf)


@dataclass(frozen=True)
class AssignmentResult:
    matching: Tuple[int, ...]  # left index -> right index
    total_cost: float


def _min_cost_columns(cost: np.ndarray) -> Optional[List[int]]:
    """Column of each row in a min-cost perfect matching, None when none exists"""
    if cost.shape[0] == 0:
        return []
    try:
        _rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return None
    return cols.tolist()


def _lexicographic_refinement(cost: np.ndarray, matching: List[int], optimum: float) -> List[int]:
    """Smallest optimal matching, row 0 first, lowest column first

    Row by row, the lowest free column that still completes to an optimal
    matching is fixed; only columns left of the current match are tried.
    """
    n = len(matching)
    finite = cost[np.isfinite(cost)]
    eps = 1e-9 * max(1.0, float(np.max(np.abs(finite))) if finite.size else 1.0)
    free = list(range(n))
    fixed_cost = 0.0

    for row in range(n):
        rest_rows = list(range(row + 1, n))
        for col in free:
            if col == matching[row]:
                break
            if not np.isfinite(cost[row, col]):
                continue
            rest_cols = [c for c in free if c != col]
            sub = cost[np.ix_(rest_rows, rest_cols)]
            tail = _min_cost_columns(sub)
            if tail is None:
                continue
            total = fixed_cost + cost[row, col] + math.fsum(sub[k, c] for k, c in enumerate(tail))
            if total <= optimum + eps:
                matching[row] = col
                matching[row + 1:] = [rest_cols[c] for c in tail]
                break
        fixed_cost += float(cost[row, matching[row]])
        free.remove(matching[row])
    return matching


def solve_assignment(problem: AssignmentProblem) -> AssignmentResult:
    """Minimum-cost perfect matching with a deterministic lexicographic tie-break"""
    n = problem.size
    if n == 0:
        return AssignmentResult(matching=(), total_cost=0.0)
    cost = problem.masked_cost()
    matching = _min_cost_columns(cost)
    if matching is None:
        raise Infeasible(f"no perfect matching of the {n}x{n} problem avoids the forbidden entries")
    optimum = math.fsum(float(cost[i, j]) for i, j in enumerate(matching))
    matching = _lexicographic_refinement(cost, matching, optimum)

    total = math.fsum(float(problem.cost[i, j]) for i, j in enumerate(matching))
    logger.debug(f"assignment {n}x{n}: cost {total:.9g}")
    return AssignmentResult(matching=tuple(matching), total_cost=total)


def solve_linear_rate(instance: MpcaInstance) -> SolveReport:
    """Linear rates: pair users with channels at edge cost R_m / l_mn"""
    started = time.perf_counter()
    validate(instance)
    if instance.rate_model is not RateModel.LINEAR:
        raise WrongModel(f"linear-match needs the linear rate model, got {instance.rate_model.value}")

    m_users, n_channels = instance.num_users, instance.num_channels
    cost = np.zeros((n_channels, n_channels))
    # rows past M are artificial users with zero-cost edges
    cost[:m_users] = instance.rate_targets[:, None] / instance.gains
    result = solve_assignment(AssignmentProblem(cost=cost))

    owner: List[Optional[int]] = [None] * n_channels
    rates = np.zeros(n_channels)
    powers = np.zeros(n_channels)
    for user in range(m_users):
        channel = result.matching[user]
        owner[channel] = user
        rates[channel] = instance.rate_targets[user]
        powers[channel] = instance.rate_model.inverse_power(instance.gains[user, channel], rates[channel])
    allocation = Allocation(channel_owner=owner, rates=rates, powers=powers)
    return make_report(instance, allocation, "linear-match", started)


def equal_block_channels(instance: MpcaInstance) -> List[List[int]]:
    m_users, n_channels = instance.num_users, instance.num_channels
    if n_channels % m_users:
        raise NotDivisible(f"N={n_channels} is not divisible by M={m_users}")
    width = n_channels // m_users
    return [list(range(b * width, (b + 1) * width)) for b in range(m_users)]


def solve_equal_blocks(instance: MpcaInstance) -> SolveReport:
    """N/M consecutive channels per user: match users to the fixed blocks"""
    started = time.perf_counter()
    validate(instance)
    blocks = equal_block_channels(instance)
    m_users = instance.num_users

    cost = np.array([
        [solve_user(instance, user, block).total_power for block in blocks]
        for user in range(m_users)
    ])
    result = solve_assignment(AssignmentProblem(cost=cost))
    channel_sets: Dict[int, Sequence[int]] = {
        user: blocks[block] for user, block in enumerate(result.matching)
    }
    allocation = build_allocation(instance, channel_sets)
    logger.debug(f"block-match: user->block {[b + 1 for b in result.matching]}")
    return make_report(
        instance, allocation, "block-match", started,
        objective=result.total_cost, details={"block_of_user": [b + 1 for b in result.matching]},
    )
