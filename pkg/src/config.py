"""Configuration management using Pydantic Settings.

All settings can be overridden through ``METAPLECTIC_``-prefixed
environment variables or a local ``.env`` file.
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.constants import (
    DEFAULT_BUDGET,
    DEFAULT_COVER_CACHE_SIZE,
    DEFAULT_SAMPLE_SIZE,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    LOG_BACKUP_COUNT,
    LOG_MAX_BYTES,
)
from src.exceptions import ConfigurationError


class Settings(BaseSettings):
    """Toolkit settings.

    Example: METAPLECTIC_BUDGET=100000 metaplectic cocycle-check --n 2 --r 2
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="METAPLECTIC_",
        case_sensitive=False,
        extra="ignore",
    )

    # Enumeration
    budget: int = Field(
        default=DEFAULT_BUDGET,
        ge=1,
        description="Maximum number of elements any exhaustive enumeration may visit",
    )
    default_seed: int = Field(
        default=DEFAULT_SEED,
        ge=0,
        description="Seed used by sampling modes when no --seed is given",
    )
    sample_size: int = Field(
        default=DEFAULT_SAMPLE_SIZE,
        ge=1,
        description="Default number of samples for Sample(k) checks",
    )
    workers: int = Field(
        default=DEFAULT_WORKERS,
        ge=1,
        le=64,
        description="Thread pool size for the acceptance suite",
    )
    cover_cache_size: int = Field(
        default=DEFAULT_COVER_CACHE_SIZE,
        ge=1,
        description="Number of built cover groups kept in memory",
    )

    # Logging Configuration
    logs_dir: Path = Field(
        default=Path("logs"),
        description="Directory for log files",
    )
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO",
        description="Logging level",
    )
    log_max_bytes: int = Field(
        default=LOG_MAX_BYTES,
        ge=1024,
        description="Maximum log file size before rotation",
    )
    log_backup_count: int = Field(
        default=LOG_BACKUP_COUNT,
        ge=1,
        le=20,
        description="Number of backup log files to keep",
    )

    @field_validator("logs_dir", mode="after")
    @classmethod
    def create_directories(cls, path: Path) -> Path:
        """Ensure directories exist."""
        path.mkdir(parents=True, exist_ok=True)
        return path


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance (singleton pattern).

    Raises:
        ConfigurationError: If an environment override fails validation
    """
    global _settings
    if _settings is None:
        try:
            _settings = Settings()
        except ValidationError as e:
            fields = [".".join(str(part) for part in err["loc"]) for err in e.errors()]
            raise ConfigurationError(
                "Invalid METAPLECTIC_ settings",
                details={"fields": fields},
                original_error=e,
            ) from e
    return _settings


def reset_settings() -> None:
    """Reset settings (useful for testing)."""
    global _settings
    _settings = None


def resolve_budget(budget: Optional[int] = None) -> int:
    """Return an explicit budget or the configured default."""
    return budget if budget is not None else get_settings().budget
