"""
Pydantic documents describing the JSON wire formats
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, StrictInt, field_validator


class InstanceDocument(BaseModel):
    """Instance JSON: row r of `gains` holds user r+1's gain on every channel"""

    model_config = ConfigDict(extra="forbid")

    rate_model: Literal["log_snr", "linear"] = "log_snr"
    num_users: StrictInt
    num_channels: StrictInt
    gains: List[List[float]]
    rate_targets: List[float]
    channel_groups: Optional[List[StrictInt]] = None
    metadata: Optional[Dict[str, Any]] = None

    @field_validator("channel_groups")
    @classmethod
    def _nonnegative_groups(cls, value):
        if value is not None and any(gid < 0 for gid in value):
            raise ValueError("group ids must be nonnegative integers")
        return value


class AllocationDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    channel_owner: List[Optional[StrictInt]]
    rates: List[float]
    powers: List[float]


class SolveReportDocument(AllocationDocument):
    model_config = ConfigDict(extra="forbid")

    objective: float
    algorithm: str
    wall_time_s: float = Field(ge=0.0)
    instance_digest: str = Field(pattern=r"^[0-9a-f]{64}$")
    details: Optional[Dict[str, Any]] = None
