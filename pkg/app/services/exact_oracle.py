"""
Exponential-time exact solvers for small instances

These are the ground truth every polynomial algorithm and both hardness
reductions are checked against. Two of them search the same space with
different structure (subset DP vs plain enumeration) so each can audit the
other.
"""

import itertools
import logging
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.errors import DimensionMismatch, Infeasible, InstanceTooLarge
from app.models.schemas import Allocation, MpcaInstance, SolveReport
from app.services.feasibility import make_report, validate
from app.services.waterfill import solve_user, waterfill_power_sorted

logger = logging.getLogger(__name__)


def _mask_channels(mask: int) -> List[int]:
    return [n for n in range(mask.bit_length()) if mask >> n & 1]


def _subset_powers(instance: MpcaInstance, user: int) -> np.ndarray:
    """Water-filled power of `user` on every channel subset (index = bitmask)"""
    gains = instance.gains[user].tolist()
    target = float(instance.rate_targets[user])
    strongest_first = sorted(range(instance.num_channels), key=lambda n: -gains[n])
    size = 1 << instance.num_channels
    powers = np.full(size, np.inf)
    for mask in range(1, size):
        members = [gains[n] for n in strongest_first if mask >> n & 1]
        powers[mask] = waterfill_power_sorted(members, target, instance.rate_model)
    return powers


def _descending_submasks(mask: int) -> np.ndarray:
    """Nonempty submasks of `mask` in the order of the (sub - 1) & mask walk"""
    subs = np.zeros(1, dtype=np.int64)
    for bit in _mask_channels(mask):
        subs = np.concatenate((subs, subs | (1 << bit)))
    # built in increasing order; drop the empty set and reverse
    return subs[:0:-1]


def build_allocation(instance: MpcaInstance, channel_sets: Dict[int, Sequence[int]]) -> Allocation:
    """Water-fill every user over its channel set and assemble the allocation"""
    owner: List[Optional[int]] = [None] * instance.num_channels
    rates = np.zeros(instance.num_channels)
    powers = np.zeros(instance.num_channels)
    for user, channels in channel_sets.items():
        channels = list(channels)
        if not channels:
            continue
        solution = solve_user(instance, user, channels)
        for position, channel in enumerate(channels):
            owner[channel] = user
            rates[channel] = solution.rates[position]
            powers[channel] = instance.rate_model.inverse_power(
                instance.gains[user, channel], solution.rates[position]
            )
    return Allocation(channel_owner=owner, rates=rates, powers=powers)


def solve_subset_dp(instance: MpcaInstance) -> SolveReport:
    """Globally optimal allocation by DP over channel subsets (3^N submask walk)"""
    started = time.perf_counter()
    validate(instance)
    m_users, n_channels = instance.num_users, instance.num_channels
    if n_channels > settings.subset_dp_max_channels:
        raise InstanceTooLarge(
            f"subset DP needs N <= {settings.subset_dp_max_channels}, got N={n_channels}"
        )

    full = (1 << n_channels) - 1
    user_powers = [_subset_powers(instance, user) for user in range(m_users)]
    # parents[m][S] = channel set given to user m in the best split of S
    parents = np.zeros((m_users, full + 1), dtype=np.int64)
    parents[0] = np.arange(full + 1)
    best = user_powers[0].copy()

    for user in range(1, m_users):
        targets = [full] if user == m_users - 1 else range(1, full + 1)
        layer = np.full(full + 1, np.inf)
        # users after this one still need a channel each
        spare = n_channels - (m_users - 1 - user)
        for mask in targets:
            if not user + 1 <= bin(mask).count("1") <= spare:
                continue
            subs = _descending_submasks(mask)
            totals = user_powers[user][subs] + best[mask ^ subs]
            pick = int(np.argmin(totals))
            layer[mask] = totals[pick]
            parents[user, mask] = subs[pick]
        best = layer
        logger.debug(f"subset DP: layer {user + 1}/{m_users} done")

    objective = float(best[full])
    if not math.isfinite(objective):
        raise Infeasible("no allocation gives every user a channel")

    channel_sets: Dict[int, List[int]] = {}
    mask = full
    for user in range(m_users - 1, -1, -1):
        chosen = int(parents[user, mask])
        channel_sets[user] = _mask_channels(chosen)
        mask ^= chosen
    allocation = build_allocation(instance, channel_sets)
    return make_report(instance, allocation, "subset-dp", started, objective=objective)


def solve_enumeration(instance: MpcaInstance) -> SolveReport:
    """Exhaustive scan over every owner vector (user or unassigned per channel)"""
    started = time.perf_counter()
    validate(instance)
    m_users, n_channels = instance.num_users, instance.num_channels
    states = (m_users + 1) ** n_channels
    if states > settings.enumeration_max_states:
        raise InstanceTooLarge(f"enumeration would visit {states} owner vectors")

    cache: Dict[Tuple[int, int], float] = {}

    def user_power(user: int, mask: int) -> float:
        key = (user, mask)
        if key not in cache:
            cache[key] = solve_user(instance, user, _mask_channels(mask)).total_power
        return cache[key]

    unassigned = m_users
    best_value = math.inf
    best_owner: Optional[Tuple[int, ...]] = None
    for owner in itertools.product(range(m_users + 1), repeat=n_channels):
        masks = [0] * m_users
        for channel, user in enumerate(owner):
            if user != unassigned:
                masks[user] |= 1 << channel
        if not all(masks):
            continue
        value = math.fsum(user_power(user, mask) for user, mask in enumerate(masks))
        if value < best_value:
            best_value, best_owner = value, owner

    if best_owner is None:
        raise Infeasible("no owner vector serves every user")
    channel_sets = {
        user: [n for n, owner in enumerate(best_owner) if owner == user] for user in range(m_users)
    }
    allocation = build_allocation(instance, channel_sets)
    return make_report(instance, allocation, "enum", started, objective=best_value)


def solve_consecutive_exact(instance: MpcaInstance, block_sizes: Sequence[int]) -> SolveReport:
    """Optimum when user m must get exactly block_sizes[m] consecutive channels

    DP over (position, served-user set): at each channel either skip it or
    start the block of a user not yet served.
    """
    started = time.perf_counter()
    validate(instance)
    m_users, n_channels = instance.num_users, instance.num_channels
    blocks = [int(b) for b in block_sizes]
    if len(blocks) != m_users:
        raise DimensionMismatch(f"{len(blocks)} block sizes for {m_users} users")
    if any(b < 1 for b in blocks):
        raise DimensionMismatch("block sizes must be positive")
    if m_users > settings.consecutive_max_users:
        raise InstanceTooLarge(f"consecutive DP needs M <= {settings.consecutive_max_users}")
    if sum(blocks) > n_channels:
        raise Infeasible(f"blocks need {sum(blocks)} channels, only {n_channels} exist")

    # block_cost[m][n]: power of user m on channels n .. n + b_m - 1
    block_cost = [
        [
            solve_user(instance, user, range(start, start + blocks[user])).total_power
            if start + blocks[user] <= n_channels else math.inf
            for start in range(n_channels)
        ]
        for user in range(m_users)
    ]

    full = (1 << m_users) - 1
    # layers[n][served] = (cost, previous position, previous served, user started or None)
    layers: List[Dict[int, Tuple[float, int, int, Optional[int]]]] = [dict() for _ in range(n_channels + 1)]
    layers[0][0] = (0.0, -1, -1, None)

    def relax(position: int, served: int, cost: float, parent: Tuple[int, int, Optional[int]]):
        current = layers[position].get(served)
        if current is None or cost < current[0]:
            layers[position][served] = (cost,) + parent

    for position in range(n_channels):
        for served, (cost, *_rest) in sorted(layers[position].items()):
            relax(position + 1, served, cost, (position, served, None))
            for user in range(m_users):
                if served >> user & 1:
                    continue
                end = position + blocks[user]
                if end > n_channels:
                    continue
                relax(end, served | 1 << user, cost + block_cost[user][position], (position, served, user))

    final = layers[n_channels].get(full)
    if final is None:
        raise Infeasible("blocks cannot be placed disjointly")

    channel_sets: Dict[int, List[int]] = {}
    position, served = n_channels, full
    while position > 0:
        _cost, prev_position, prev_served, user = layers[position][served]
        if user is not None:
            channel_sets[user] = list(range(prev_position, prev_position + blocks[user]))
        position, served = prev_position, prev_served

    allocation = build_allocation(instance, channel_sets)
    return make_report(
        instance, allocation, "consecutive", started,
        objective=final[0], details={"block_sizes": blocks},
    )
