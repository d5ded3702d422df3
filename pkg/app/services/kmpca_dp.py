"""
Dynamic programming for 1-MPCA and K-MPCA

Channels fall into K groups; inside a group every user sees one gain, so only
the number of channels a user takes from each group matters. Row m of the
table holds c_m(h), the least power for users 1..m using exactly h_j channels
of group j, and row m reads only row m-1.
"""

import itertools
import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.errors import InstanceTooLarge, WrongStructure
from app.models.schemas import GroupStructure, MpcaInstance, SolveReport
from app.services.exact_oracle import build_allocation
from app.services.feasibility import make_report, validate
from app.services.waterfill import waterfill_grouped

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupedInstance:
    base: MpcaInstance
    groups: GroupStructure
    user_group_gains: np.ndarray

    @property
    def num_groups(self) -> int:
        return self.groups.num_groups


@dataclass(frozen=True, eq=False)
class DpTable:
    """values[m-1][h_1, ..., h_K] = c_m(h); choices holds the k-vector that achieved it"""

    values: np.ndarray
    choices: np.ndarray


def build_grouped(instance: MpcaInstance, groups: GroupStructure) -> GroupedInstance:
    """Attach a group structure, checking that gains are uniform inside every group"""
    if len(groups.group_id) != instance.num_channels:
        raise WrongStructure(
            f"group structure covers {len(groups.group_id)} channels, instance has {instance.num_channels}"
        )
    user_group_gains = np.empty((instance.num_users, groups.num_groups))
    for group in range(groups.num_groups):
        members = groups.members(group)
        if not members:
            raise WrongStructure(f"group {group} is empty")
        block = instance.gains[:, members]
        if not np.all(block == block[:, :1]):
            raise WrongStructure(f"gains are not uniform inside group {group}")
        user_group_gains[:, group] = block[:, 0]
    user_group_gains.setflags(write=False)
    return GroupedInstance(base=instance, groups=groups, user_group_gains=user_group_gains)


def _assign_counts(grouped: GroupedInstance, counts: List[Tuple[int, ...]]) -> Dict[int, List[int]]:
    """Hand out group members in ascending index order, user 1 first"""
    pools = [iter(grouped.groups.members(j)) for j in range(grouped.num_groups)]
    channel_sets: Dict[int, List[int]] = {}
    for user, vector in enumerate(counts):
        channels: List[int] = []
        for group, k in enumerate(vector):
            channels.extend(next(pools[group]) for _ in range(k))
        channel_sets[user] = sorted(channels)
    return channel_sets


def fill_1mpca_table(grouped: GroupedInstance) -> DpTable:
    base = grouped.base
    m_users, n_channels = base.num_users, base.num_channels
    model = base.rate_model

    # p[m][k] = power of user m on k channels of the single group
    p = [
        [math.inf] + [
            model.uniform_power(float(grouped.user_group_gains[user, 0]), k, float(base.rate_targets[user]))
            for k in range(1, n_channels + 1)
        ]
        for user in range(m_users)
    ]

    values = np.full((m_users, n_channels + 1), np.inf)
    choices = np.zeros((m_users, n_channels + 1, 1), dtype=np.int64)
    slack = n_channels - m_users

    for h in range(1, slack + 2):
        values[0, h] = p[0][h]
        choices[0, h, 0] = h

    previous = values[0].tolist()
    for user in range(1, m_users):
        row = [math.inf] * (n_channels + 1)
        picks = [0] * (n_channels + 1)
        costs = p[user]
        # valid entries: user + 1 <= h <= slack + user + 1
        for h in range(user + 1, slack + user + 2):
            best, best_k = math.inf, 0
            for k in range(1, h - user + 1):
                value = costs[k] + previous[h - k]
                if value < best:
                    best, best_k = value, k
            row[h], picks[h] = best, best_k
        values[user] = row
        choices[user, :, 0] = picks
        previous = row
    return DpTable(values=values, choices=choices)


def solve_1mpca(grouped: GroupedInstance) -> SolveReport:
    """Global optimum of 1-MPCA: c_m(h) = min_k p_m^k + c_{m-1}(h - k)"""
    started = time.perf_counter()
    validate(grouped.base)
    if grouped.num_groups != 1:
        raise WrongStructure(f"1-MPCA needs a single channel group, got K={grouped.num_groups}")

    table = fill_1mpca_table(grouped)
    m_users, n_channels = grouped.base.num_users, grouped.base.num_channels
    counts: List[Tuple[int, ...]] = [()] * m_users
    h = n_channels
    for user in range(m_users - 1, -1, -1):
        k = int(table.choices[user, h, 0])
        counts[user] = (k,)
        h -= k

    allocation = build_allocation(grouped.base, _assign_counts(grouped, counts))
    objective = float(table.values[m_users - 1, n_channels])
    logger.debug(f"1-MPCA: channel counts {[c[0] for c in counts]}")
    return make_report(grouped.base, allocation, "1mpca", started, objective=objective)


def check_kmpca_guard(grouped: GroupedInstance) -> None:
    k_groups = grouped.num_groups
    n_channels = grouped.base.num_channels
    if k_groups > settings.kmpca_max_groups:
        raise InstanceTooLarge(f"K-MPCA DP supports K <= {settings.kmpca_max_groups}, got K={k_groups}")
    work = grouped.base.num_users * float(n_channels) ** (2 * k_groups)
    if work > settings.kmpca_max_work:
        raise InstanceTooLarge(f"K-MPCA DP work M*N^(2K) = {work:.3g} exceeds {settings.kmpca_max_work:.3g}")


def fill_kmpca_table(grouped: GroupedInstance) -> DpTable:
    base = grouped.base
    m_users, n_channels = base.num_users, base.num_channels
    sizes = grouped.groups.group_sizes
    shape = tuple(size + 1 for size in sizes)
    cap = n_channels - m_users + 1

    # all count vectors in C order; flat index is linear in the vector,
    # so flat(h - k) == flat(h) - flat(k)
    vectors = list(itertools.product(*(range(dim) for dim in shape)))
    totals = [sum(vector) for vector in vectors]

    def user_costs(user: int) -> List[float]:
        gains = grouped.user_group_gains[user].tolist()
        target = float(base.rate_targets[user])
        # p^(0,...,0) = inf: every user needs at least one channel
        return [
            math.inf if total == 0
            else waterfill_grouped(gains, vector, target, base.rate_model)
            for vector, total in zip(vectors, totals)
        ]

    values = np.full((m_users,) + shape, np.inf)
    choices = np.zeros((m_users,) + shape + (len(sizes),), dtype=np.int64)
    flat_values = values.reshape(m_users, -1)
    flat_choices = choices.reshape(m_users, -1, len(sizes))

    previous = [0.0] + [math.inf] * (len(vectors) - 1)  # c_0: nothing allocated
    for user in range(m_users):
        costs = user_costs(user)
        row = [math.inf] * len(vectors)
        picks = [0] * len(vectors)
        for f, h in enumerate(vectors):
            if totals[f] < user + 1:
                continue
            bound = tuple(min(hj, cap) for hj in h)
            best, best_g = math.inf, 0
            for g, k in enumerate(vectors):
                if g == 0 or g > f:
                    continue
                if any(kj > bj for kj, bj in zip(k, bound)):
                    continue
                # the remaining users each still need a channel
                if totals[f] - totals[g] < user:
                    continue
                value = costs[g] + previous[f - g]
                if value < best:
                    best, best_g = value, g
            row[f] = best
            picks[f] = best_g
        flat_values[user] = row
        flat_choices[user] = [vectors[g] for g in picks]
        previous = row
        logger.debug(f"K-MPCA: row {user + 1}/{m_users} filled over {len(vectors)} states")
    return DpTable(values=values, choices=choices)


def solve_kmpca(grouped: GroupedInstance) -> SolveReport:
    """Global optimum of K-MPCA over count vectors (k_1, ..., k_K) per user"""
    started = time.perf_counter()
    validate(grouped.base)
    check_kmpca_guard(grouped)

    table = fill_kmpca_table(grouped)
    m_users = grouped.base.num_users
    h = tuple(grouped.groups.group_sizes)
    objective = float(table.values[(m_users - 1,) + h])

    counts: List[Optional[Tuple[int, ...]]] = [None] * m_users
    for user in range(m_users - 1, -1, -1):
        k = tuple(int(x) for x in table.choices[(user,) + h])
        counts[user] = k
        h = tuple(hj - kj for hj, kj in zip(h, k))

    allocation = build_allocation(grouped.base, _assign_counts(grouped, counts))
    return make_report(
        grouped.base, allocation, "kmpca", started,
        objective=objective, details={"K": grouped.num_groups, "counts": [list(c) for c in counts]},
    )
