"""
Instance validation and allocation auditing

`evaluate` is the single source of truth for objectives: every solver builds
its report through `make_report`, which audits the allocation against the
instance before anything is returned.
"""

import logging
import math
import time
from typing import Any, Dict, Optional

import numpy as np

from app.errors import (
    DimensionMismatch,
    NonPositiveGain,
    NonPositiveRate,
    PowerRateMismatch,
    RateTargetMissed,
    TooManyUsers,
)
from app.models.schemas import (
    POWER_TOLERANCE,
    RATE_TOLERANCE,
    Allocation,
    MpcaInstance,
    SolveReport,
)
from app.utils.instance_io import instance_digest

logger = logging.getLogger(__name__)


def validate(instance: MpcaInstance) -> None:
    """Raise on the first violated instance invariant"""
    m, n = instance.num_users, instance.num_channels
    if m < 1 or n < 1:
        raise DimensionMismatch(f"num_users and num_channels must be positive, got M={m}, N={n}")
    if instance.gains.shape != (m, n):
        raise DimensionMismatch(f"gain matrix has shape {instance.gains.shape}, expected ({m}, {n})")
    if instance.rate_targets.shape != (m,):
        raise DimensionMismatch(f"rate_targets has length {instance.rate_targets.shape[0]}, expected {m}")
    if instance.channel_groups is not None and len(instance.channel_groups) != n:
        raise DimensionMismatch(f"channel_groups has length {len(instance.channel_groups)}, expected {n}")
    if m > n:
        raise TooManyUsers(m, n)

    bad = np.argwhere(~(instance.gains > 0.0) | ~np.isfinite(instance.gains))
    if bad.size:
        user, channel = (int(i) for i in bad[0])
        raise NonPositiveGain(user, channel, float(instance.gains[user, channel]))

    bad_rates = np.flatnonzero(~(instance.rate_targets > 0.0) | ~np.isfinite(instance.rate_targets))
    if bad_rates.size:
        user = int(bad_rates[0])
        raise NonPositiveRate(user, float(instance.rate_targets[user]))


def evaluate(instance: MpcaInstance, allocation: Allocation) -> float:
    """Total power of a feasible allocation; raises if the allocation is not feasible"""
    n_channels = instance.num_channels
    if allocation.num_channels != n_channels or allocation.rates.shape != (n_channels,) \
            or allocation.powers.shape != (n_channels,):
        raise DimensionMismatch(
            f"allocation covers {allocation.num_channels} channels, instance has {n_channels}"
        )

    delivered = [[] for _ in range(instance.num_users)]
    for channel, owner in enumerate(allocation.channel_owner):
        rate = float(allocation.rates[channel])
        power = float(allocation.powers[channel])
        if owner is None:
            if rate != 0.0 or power != 0.0:
                raise PowerRateMismatch(channel, power, 0.0)
            continue
        if not 0 <= owner < instance.num_users:
            raise DimensionMismatch(f"channel {channel + 1} owned by unknown user {owner + 1}")
        if rate < 0.0 or power < 0.0:
            raise PowerRateMismatch(channel, power, float("nan"))
        expected = float(instance.rate_model.inverse_power(instance.gains[owner, channel], rate))
        if not math.isclose(power, expected, rel_tol=POWER_TOLERANCE, abs_tol=1e-300):
            raise PowerRateMismatch(channel, power, expected)
        delivered[owner].append(rate)

    for user, rates in enumerate(delivered):
        total = math.fsum(rates)
        target = float(instance.rate_targets[user])
        if total < target - RATE_TOLERANCE:
            raise RateTargetMissed(user, total, target)

    return allocation.total_power


def make_report(
    instance: MpcaInstance,
    allocation: Allocation,
    algorithm: str,
    started: float,
    objective: Optional[float] = None,
    details: Optional[Dict[str, Any]] = None,
) -> SolveReport:
    """Audit `allocation` and wrap it; `started` is a time.perf_counter() stamp

    The reported objective is always the audited total power. `objective`,
    the solver's own value, is only cross-checked against it.
    """
    audited = evaluate(instance, allocation)
    if objective is not None and not math.isclose(
        objective, audited, rel_tol=POWER_TOLERANCE, abs_tol=POWER_TOLERANCE
    ):
        logger.warning(f"{algorithm}: solver objective {objective!r} differs from audited {audited!r}")
    return SolveReport(
        objective=float(audited),
        allocation=allocation,
        algorithm=algorithm,
        wall_time=time.perf_counter() - started,
        instance_digest=instance_digest(instance),
        details=dict(details or {}),
    )
