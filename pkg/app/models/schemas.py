"""
Domain types shared by every solver
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.errors import DimensionMismatch

# Absolute slack on per-user rate sums
RATE_TOLERANCE = 1e-9
# Relative slack between a stored power and the power its rate implies
POWER_TOLERANCE = 1e-9

LN2 = math.log(2.0)


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    try:
        array = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"{name} is not a rectangular numeric array: {exc}") from exc
    if array.ndim != ndim:
        raise DimensionMismatch(f"{name} must have {ndim} dimension(s), got shape {array.shape}")
    array.setflags(write=False)
    return array


class RateModel(str, Enum):
    """Rate as a function of power on one user/channel pair"""

    LOG_SNR = "log_snr"
    LINEAR = "linear"

    def rate(self, gain, power):
        """log2(1 + gP) for LogSnr, gP for Linear"""
        if self is RateModel.LINEAR:
            return np.multiply(gain, power)
        return np.log1p(np.multiply(gain, power)) / LN2

    def inverse_power(self, gain, rate):
        """Power needed to carry `rate`: (2^r - 1)/g for LogSnr, r/g for Linear"""
        if self is RateModel.LINEAR:
            return np.divide(rate, gain)
        return np.expm1(np.multiply(rate, LN2)) / gain

    def derivative(self, gain, rate):
        """Slope of the power function at `rate`"""
        if self is RateModel.LINEAR:
            return np.divide(1.0, gain) + np.zeros_like(np.asarray(rate, dtype=np.float64))
        return LN2 * np.exp2(rate) / gain

    def uniform_power(self, gain: float, count: int, rate: float) -> float:
        """Optimal power when `rate` is spread over `count` channels of equal gain"""
        if self is RateModel.LINEAR:
            return float(rate / gain)
        return float(count * math.expm1(rate * LN2 / count) / gain)


@dataclass(frozen=True, eq=False)
class MpcaInstance:
    """The full problem input: gains (row = user), rate targets and the rate model"""

    num_users: int
    num_channels: int
    gains: np.ndarray
    rate_targets: np.ndarray
    rate_model: RateModel = RateModel.LOG_SNR
    channel_groups: Optional[Tuple[int, ...]] = None
    metadata: Optional[Mapping[str, Any]] = None

    def __post_init__(self):
        object.__setattr__(self, "gains", _frozen_array(self.gains, 2, "gains"))
        object.__setattr__(self, "rate_targets", _frozen_array(self.rate_targets, 1, "rate_targets"))
        object.__setattr__(self, "rate_model", RateModel(self.rate_model))
        if self.channel_groups is not None:
            object.__setattr__(self, "channel_groups", tuple(int(g) for g in self.channel_groups))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MpcaInstance):
            return NotImplemented
        return (
            self.num_users == other.num_users
            and self.num_channels == other.num_channels
            and self.rate_model is other.rate_model
            and self.gains.shape == other.gains.shape
            and self.gains.tobytes() == other.gains.tobytes()
            and self.rate_targets.tobytes() == other.rate_targets.tobytes()
            and self.channel_groups == other.channel_groups
            and dict(self.metadata or {}) == dict(other.metadata or {})
        )

    __hash__ = None

    def with_metadata(self, **entries) -> "MpcaInstance":
        merged = dict(self.metadata or {})
        merged.update(entries)
        return MpcaInstance(
            num_users=self.num_users,
            num_channels=self.num_channels,
            gains=self.gains,
            rate_targets=self.rate_targets,
            rate_model=self.rate_model,
            channel_groups=self.channel_groups,
            metadata=merged,
        )

    def permute_channels(self, order: Sequence[int]) -> "MpcaInstance":
        """Instance whose channel n is this instance's channel order[n]"""
        order = list(order)
        groups = None
        if self.channel_groups is not None:
            groups = tuple(self.channel_groups[n] for n in order)
        return MpcaInstance(
            num_users=self.num_users,
            num_channels=self.num_channels,
            gains=self.gains[:, order],
            rate_targets=self.rate_targets,
            rate_model=self.rate_model,
            channel_groups=groups,
            metadata=self.metadata,
        )


@dataclass(frozen=True, eq=False)
class Allocation:
    """Channel ownership (0-based user index or None) plus per-channel rates and powers"""

    channel_owner: Tuple[Optional[int], ...]
    rates: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "channel_owner", tuple(self.channel_owner))
        object.__setattr__(self, "rates", _frozen_array(self.rates, 1, "rates"))
        object.__setattr__(self, "powers", _frozen_array(self.powers, 1, "powers"))

    @property
    def num_channels(self) -> int:
        return len(self.channel_owner)

    @property
    def total_power(self) -> float:
        return math.fsum(self.powers.tolist())

    def channels_of(self, user: int) -> List[int]:
        return [n for n, owner in enumerate(self.channel_owner) if owner == user]

    def active_channels_of(self, user: int) -> List[int]:
        """Channels owned by `user` that carry a strictly positive rate"""
        return [n for n in self.channels_of(user) if self.rates[n] > 0.0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "channel_owner": [None if owner is None else owner + 1 for owner in self.channel_owner],
            "rates": self.rates.tolist(),
            "powers": self.powers.tolist(),
        }


@dataclass
class SolveReport:
    """What every solver returns; the CLI/bench exchange record"""

    objective: float
    allocation: Allocation
    algorithm: str
    wall_time: float
    instance_digest: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "objective": self.objective,
            "algorithm": self.algorithm,
            "wall_time_s": self.wall_time,
            "instance_digest": self.instance_digest,
        }
        payload.update(self.allocation.to_dict())
        if self.details:
            payload["details"] = self.details
        return payload


@dataclass(frozen=True, eq=False)
class SingleUserProblem:
    gains: np.ndarray
    rate_target: float
    rate_model: RateModel = RateModel.LOG_SNR

    def __post_init__(self):
        object.__setattr__(self, "gains", _frozen_array(self.gains, 1, "gains"))
        object.__setattr__(self, "rate_model", RateModel(self.rate_model))


@dataclass(frozen=True, eq=False)
class SingleUserSolution:
    rates: np.ndarray
    total_power: float
    active_count: int


@dataclass(frozen=True)
class GroupStructure:
    """Partition of the channels into K uniform-gain groups"""

    group_id: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "group_id", tuple(int(g) for g in self.group_id))

    @property
    def num_groups(self) -> int:
        return max(self.group_id) + 1 if self.group_id else 0

    @property
    def group_sizes(self) -> Tuple[int, ...]:
        sizes = [0] * self.num_groups
        for gid in self.group_id:
            sizes[gid] += 1
        return tuple(sizes)

    def members(self, group: int) -> List[int]:
        return [n for n, gid in enumerate(self.group_id) if gid == group]

    def to_dict(self) -> Dict[str, Any]:
        return {"K": self.num_groups, "group_id": list(self.group_id), "group_sizes": list(self.group_sizes)}
