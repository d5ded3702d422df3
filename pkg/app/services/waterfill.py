"""
Single-user rate allocation by water-filling

For LogSnr the optimum over k active channels (strongest gains first) gives
channel i the rate R/k + log2 g_i - mean(log2 g_1..g_k); the active set is
the largest k for which the weakest active channel still gets a positive
rate. Linear rate functions put the whole rate on the best channel.
"""

import logging
import math
from typing import Sequence

import numpy as np

from app.models.schemas import (
    LN2,
    MpcaInstance,
    RateModel,
    SingleUserProblem,
    SingleUserSolution,
)

logger = logging.getLogger(__name__)


def _leading_true(mask: np.ndarray) -> int:
    """Length of the all-True prefix of a boolean vector"""
    failed = np.flatnonzero(~mask)
    return int(failed[0]) if failed.size else int(mask.size)


def waterfill(problem: SingleUserProblem) -> SingleUserSolution:
    gains = problem.gains
    target = float(problem.rate_target)
    model = problem.rate_model
    rates = np.zeros(gains.size, dtype=np.float64)

    if model is RateModel.LINEAR:
        best = int(np.argmax(gains))  # first maximum, i.e. lowest index
        rates[best] = target
        return SingleUserSolution(rates=rates, total_power=target / float(gains[best]), active_count=1)

    order = np.argsort(-gains, kind="stable")
    log_gains = np.log2(gains[order])
    prefix = np.cumsum(log_gains)
    sizes = np.arange(1, gains.size + 1)

    # rate the weakest channel would get if the k strongest were active
    weakest = target / sizes + log_gains - prefix / sizes
    active = max(_leading_true(weakest > 0.0), 1)

    active_rates = target / active + log_gains[:active] - prefix[active - 1] / active
    rates[order[:active]] = active_rates
    powers = model.inverse_power(gains[order[:active]], active_rates)
    total = math.fsum(powers.tolist())
    logger.debug(f"waterfill: {active}/{gains.size} channels active, power {total:.6g}")
    return SingleUserSolution(rates=rates, total_power=total, active_count=active)


def waterfill_power_sorted(gains_desc: Sequence[float], rate_target: float, rate_model: RateModel) -> float:
    """Power-only water-filling over plain floats already sorted strongest first

    Scalar fast path for the exact oracles, which need the power of every
    channel subset and cannot afford array set-up per call.
    """
    if rate_model is RateModel.LINEAR:
        return rate_target / gains_desc[0]
    logs = [math.log2(g) for g in gains_desc]
    active = 0
    prefix = 0.0
    for log_gain in logs:
        grown = prefix + log_gain
        if active and rate_target / (active + 1) + log_gain - grown / (active + 1) <= 0.0:
            break
        active += 1
        prefix = grown
    return math.fsum(
        math.expm1((rate_target / active + logs[i] - prefix / active) * LN2) / gains_desc[i]
        for i in range(active)
    )


def solve_user(instance: MpcaInstance, user: int, channels: Sequence[int]) -> SingleUserSolution:
    """Water-fill `user`'s rate target over the given channels of `instance`"""
    problem = SingleUserProblem(
        gains=instance.gains[user, list(channels)],
        rate_target=float(instance.rate_targets[user]),
        rate_model=instance.rate_model,
    )
    return waterfill(problem)


def waterfill_grouped(
    group_gains: Sequence[float],
    group_counts: Sequence[int],
    rate_target: float,
    rate_model: RateModel = RateModel.LOG_SNR,
) -> float:
    """Total power of water-filling over `count` channels of each group gain

    Equal-gain channels are always jointly active or jointly idle, so the
    active-set scan runs over groups instead of channels.
    """
    pairs = [(float(g), int(c)) for g, c in zip(group_gains, group_counts) if int(c) > 0]
    if not pairs:
        return math.inf
    if rate_model is RateModel.LINEAR:
        return rate_target / max(g for g, _ in pairs)
    if len(pairs) == 1:
        gain, count = pairs[0]
        return rate_model.uniform_power(gain, count, rate_target)

    pairs.sort(key=lambda pair: -pair[0])
    channels = 0
    log_sum = 0.0
    active = 0
    for gain, count in pairs:
        grown_channels = channels + count
        grown_sum = log_sum + count * math.log2(gain)
        if active and rate_target / grown_channels + math.log2(gain) - grown_sum / grown_channels <= 0.0:
            break
        channels, log_sum, active = grown_channels, grown_sum, active + 1

    total = []
    for gain, count in pairs[:active]:
        rate = rate_target / channels + math.log2(gain) - log_sum / channels
        total.append(count * float(rate_model.inverse_power(gain, rate)))
    return math.fsum(total)
