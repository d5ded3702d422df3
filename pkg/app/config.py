"""
Configuration settings for the MPCA solver suite
"""

import os

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings, overridable through MPCA_* environment variables"""

    model_config = SettingsConfigDict(env_prefix="MPCA_", env_file=".env", extra="ignore")

    # Runtime settings
    log_level: str = "INFO"
    threads: int = os.cpu_count() or 1

    # Exact oracle guards
    subset_dp_max_channels: int = 18
    enumeration_max_states: int = 20_000_000
    consecutive_max_users: int = 20

    # K-MPCA guards
    kmpca_max_groups: int = 4
    kmpca_max_work: float = 1e9

    # Reduction settings
    decide_margin: float = 1e-6
    truth_table_max_vars: int = 6

    @field_validator("threads")
    @classmethod
    def _at_least_one_thread(cls, value: int) -> int:
        if value < 1:
            raise ValueError("MPCA_THREADS must be >= 1")
        return value

    @field_validator(
        "subset_dp_max_channels",
        "enumeration_max_states",
        "consecutive_max_users",
        "kmpca_max_groups",
        "kmpca_max_work",
        "truth_table_max_vars",
    )
    @classmethod
    def _positive_guard(cls, value):
        if value <= 0:
            raise ValueError("solver guards must be positive")
        return value

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        return value.upper()


# Global settings instance
settings = Settings()
