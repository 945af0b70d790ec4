"""Configuration management with validation."""

from __future__ import annotations

from typing import Literal

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Inertial dynamics lab configuration."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="DYNLAB_",
        case_sensitive=False,
        extra="ignore",
    )

    version: str = "0.1.0"
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"
    horizon: float = 50.0
    step: float = 1e-3
    sample_every: int = 100
    seed: int = 42
    equilibrium_tol: float = 1e-10
    equilibrium_max_iter: int = 200
    blowup_threshold: float = 1e12
    jobs: int = 1
    cocoercivity_samples: int = 2000

    @field_validator(
        "horizon",
        "step",
        "equilibrium_tol",
        "blowup_threshold",
    )
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Validate that lengths and tolerances are strictly positive."""
        if not v > 0:
            raise ValueError("must be strictly positive")
        return v

    @field_validator(
        "sample_every", "jobs", "equilibrium_max_iter", "cocoercivity_samples"
    )
    @classmethod
    def validate_count(cls, v: int) -> int:
        """Validate that counts are at least one."""
        if v < 1:
            raise ValueError("must be at least 1")
        return v
