"""
Seeded random K-MPCA instances
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from app.errors import BadFlags
from app.models.schemas import GroupStructure, MpcaInstance, RateModel
from app.services.recognition import synthesize

logger = logging.getLogger(__name__)

PRNG_NAME = "PCG64"
DEFAULT_DIST = "loguniform:0.1,10"
DEFAULT_RATE_DIST = "loguniform:0.1,4"
MAX_RESAMPLES = 1000


def parse_dist(text: str) -> Tuple[float, float]:
    """`loguniform:lo,hi` -> (lo, hi)"""
    kind, _, bounds = text.partition(":")
    if kind != "loguniform":
        raise BadFlags(f"unsupported distribution {text!r}, expected loguniform:lo,hi")
    try:
        lo, hi = (float(part) for part in bounds.split(","))
    except ValueError:
        raise BadFlags(f"bad distribution bounds in {text!r}") from None
    if not 0.0 < lo <= hi:
        raise BadFlags(f"need 0 < lo <= hi in {text!r}")
    return lo, hi


def even_group_sizes(num_channels: int, num_groups: int) -> Tuple[int, ...]:
    base, extra = divmod(num_channels, num_groups)
    return tuple(base + (1 if j < extra else 0) for j in range(num_groups))


def _loguniform(rng: np.random.Generator, lo: float, hi: float, size) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=size))


def generate_instance(
    users: int,
    channels: int,
    k: int = 1,
    seed: int = 0,
    dist: str = DEFAULT_DIST,
    group_sizes: Optional[Sequence[int]] = None,
    rate_dist: str = DEFAULT_RATE_DIST,
    rate_model: RateModel = RateModel.LOG_SNR,
) -> MpcaInstance:
    """Instance with exactly k groups of consecutive channels and distinct group columns"""
    if users < 1 or channels < 1:
        raise BadFlags(f"need positive --users and --channels, got {users}, {channels}")
    if users > channels:
        raise BadFlags(f"--users {users} exceeds --channels {channels}")
    if not 1 <= k <= channels:
        raise BadFlags(f"--k must be in 1..{channels}, got {k}")
    if group_sizes is None:
        group_sizes = even_group_sizes(channels, k)
    group_sizes = tuple(int(size) for size in group_sizes)
    if len(group_sizes) != k or any(size < 1 for size in group_sizes) or sum(group_sizes) != channels:
        raise BadFlags(f"--group-sizes {list(group_sizes)} must be {k} positive sizes summing to {channels}")

    gain_lo, gain_hi = parse_dist(dist)
    rate_lo, rate_hi = parse_dist(rate_dist)
    rng = np.random.default_rng(seed)

    group_gains = _loguniform(rng, gain_lo, gain_hi, (users, k))
    for _ in range(MAX_RESAMPLES):
        if np.unique(group_gains, axis=1).shape[1] == k:
            break
        group_gains = _loguniform(rng, gain_lo, gain_hi, (users, k))
    else:
        raise BadFlags(f"could not draw {k} distinct group columns from {dist}")
    rate_targets = _loguniform(rng, rate_lo, rate_hi, users)

    group_id = [j for j, size in enumerate(group_sizes) for _ in range(size)]
    instance = synthesize(GroupStructure(group_id=group_id), group_gains, rate_targets, RateModel(rate_model))
    logger.debug(f"generated M={users} N={channels} K={k} seed={seed}")
    return instance.with_metadata(prng=PRNG_NAME, seed=seed, dist=dist, rate_dist=rate_dist)
