"""
Configuration for partition-rank.

Constants live on PartitionRankConfig; a handful can be overridden through
environment variables, read by load_settings().
"""

import os
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field

from .errors import DomainError


class PartitionRankConfig:
    """Configuration constants."""

    DEFAULT_ORACLE_LIMIT = 12
    DEFAULT_GRID_CELL_LIMIT = 16
    PERCENT_DECIMALS = 2
    INTERNAL_VALUE_TOLERANCE = Fraction(5, 1000)
    DEFAULT_LOG_LEVEL = "WARNING"
    DEFAULT_TARGETS = ("1.A.3.b", "1.A.3.a", "2.A.1", "2.F.1", "3", "3.B")
    INDENT_WIDTH = 2

    ORACLE_LIMIT_ENV = "PARTITION_RANK_ORACLE_LIMIT"
    GRID_LIMIT_ENV = "PARTITION_RANK_GRID_LIMIT"
    LOG_LEVEL_ENV = "PARTITION_RANK_LOG_LEVEL"

    EXIT_OK = 0
    EXIT_INVALID = 2
    EXIT_INFEASIBLE = 3
    EXIT_SIZE_LIMIT = 4
    EXIT_USAGE = 5


class Settings(BaseModel):
    """Effective settings after environment overrides."""

    model_config = ConfigDict(frozen=True)

    oracle_limit: int = Field(..., ge=0, description="Largest non-special vertex count the oracle enumerates")
    grid_cell_limit: int = Field(..., ge=0, description="Largest cell count the free-rectangle oracle tiles")
    log_level: str = PartitionRankConfig.DEFAULT_LOG_LEVEL


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{name} must be an integer, got '{raw}'")
    if value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}")
    return value


def load_settings() -> Settings:
    """Read environment overrides on top of the configuration constants."""
    log_level = os.getenv(
        PartitionRankConfig.LOG_LEVEL_ENV, PartitionRankConfig.DEFAULT_LOG_LEVEL
    ).upper()
    if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise DomainError(f"unknown log level '{log_level}'")

    return Settings(
        oracle_limit=_int_from_env(
            PartitionRankConfig.ORACLE_LIMIT_ENV, PartitionRankConfig.DEFAULT_ORACLE_LIMIT
        ),
        grid_cell_limit=_int_from_env(
            PartitionRankConfig.GRID_LIMIT_ENV, PartitionRankConfig.DEFAULT_GRID_CELL_LIMIT
        ),
        log_level=log_level,
    )
