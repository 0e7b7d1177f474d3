#!/usr/bin/env python3
"""
Configuration Management
Type-safe settings loaded from the environment (BOHMQ_*) and an optional .env file.
"""

from typing import Optional, Dict, Any, List
from enum import Enum

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Environment(str, Enum):
    """Application environment."""
    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


class LogFormat(str, Enum):
    """Log output format."""
    JSON = "json"
    TEXT = "text"


class ObservabilityConfig(BaseModel):
    """Observability configuration."""
    log_level: str = Field(default="WARNING")
    log_format: LogFormat = LogFormat.TEXT
    timing_enabled: bool = True

    @field_validator("log_level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return level


class NumericsConfig(BaseModel):
    """Tolerances shared by the solvers and diagnostics."""
    node_epsilon: float = Field(default=1e-6, gt=0.0, lt=1.0)
    constancy_rel_tol: float = Field(default=1e-6, gt=0.0)
    constancy_abs_tol: float = Field(default=1e-9, gt=0.0)
    rest_tolerance: float = Field(default=1e-9, gt=0.0)
    density_floor: float = Field(default=1e-3, ge=0.0, lt=1.0)
    phi_samples: int = Field(default=8, ge=2, le=1024)
    winding_tolerance: float = Field(default=1e-10, gt=0.0)


class ParallelConfig(BaseModel):
    """Concurrent evaluation of independent trajectories and channels."""
    enabled: bool = False
    max_workers: int = Field(default=4, ge=1, le=256)


class Settings(BaseSettings):
    """
    Main application settings.

    Loads from environment variables and .env file.
    """

    model_config = SettingsConfigDict(
        env_prefix="BOHMQ_",
        env_nested_delimiter="__",
        case_sensitive=False,
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    environment: Environment = Environment.DEVELOPMENT
    debug: bool = False

    observability: ObservabilityConfig = Field(default_factory=ObservabilityConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    parallel: ParallelConfig = Field(default_factory=ParallelConfig)

    @field_validator("environment", mode="before")
    @classmethod
    def validate_environment(cls, v):
        """Ensure environment is valid."""
        if isinstance(v, str):
            return Environment(v.lower())
        return v

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to a plain dictionary."""
        return self.model_dump(mode="json")

    def validate_config(self) -> List[str]:
        """
        Validate cross-field constraints.

        Returns:
            List of validation error messages (empty if valid)
        """
        issues = []

        if self.numerics.rest_tolerance >= 1e-3:
            issues.append("numerics.rest_tolerance should be far below grid spacing (< 1e-3)")

        if self.numerics.constancy_abs_tol > self.numerics.constancy_rel_tol:
            issues.append("numerics.constancy_abs_tol should not exceed constancy_rel_tol")

        if self.parallel.enabled and self.parallel.max_workers < 2:
            issues.append("parallel.enabled requires max_workers >= 2")

        return issues


class ConfigManager:
    """
    Settings manager.

    Validates on construction and on every reload/update.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self._settings = settings or Settings()
        self._validate()

    def _validate(self):
        issues = self._settings.validate_config()
        if issues:
            error_msg = "Configuration validation failed:\n" + "\n".join(f"  - {issue}" for issue in issues)
            raise ValueError(error_msg)

    @property
    def settings(self) -> Settings:
        """Get current settings."""
        return self._settings

    def reload(self):
        """Reload settings from environment."""
        self._settings = Settings()
        self._validate()

    def update(self, **kwargs):
        """
        Replace top-level settings values.

        Args:
            **kwargs: Settings fields to replace
        """
        self._settings = self._settings.model_copy(update=kwargs)
        self._validate()


_manager: Optional[ConfigManager] = None


def get_settings() -> Settings:
    """Get global settings (created lazily)."""
    global _manager
    if _manager is None:
        _manager = ConfigManager()
    return _manager.settings


def reload_settings() -> Settings:
    """Reload global settings."""
    global _manager
    _manager = ConfigManager()
    return _manager.settings
