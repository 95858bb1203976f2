"""Configuration management using environment variables."""
from enum import Enum
from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class SolverName(str, Enum):
    """Available training algorithms."""
    FW = "fw"
    PG = "pg"


class DataFormat(str, Enum):
    """Supported dataset file formats."""
    SPARSE = "sparse"
    DENSE = "dense"

    @property
    def suffix(self) -> str:
        """Get the conventional file suffix for this format."""
        return ".svm" if self is DataFormat.SPARSE else ".csv"


class ScheduleKind(str, Enum):
    """Iteration schedules for recording the primal objective."""
    LOG = "log"
    ALL = "all"


class Settings(BaseSettings):
    """Runtime settings loaded from SCSVM_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SCSVM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Parallelism cap for BLAS pools and fold workers
    threads: Optional[int] = None

    # Logging
    log_level: str = "INFO"

    # Per-iteration invariant assertions in the solvers
    debug_checks: bool = False

    # Numerics
    eval_points: int = 55
    gap_floor: float = 1e-10

    @property
    def max_workers(self) -> int:
        """Get the worker count for independent trainings."""
        return self.threads if self.threads and self.threads > 0 else 1


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
