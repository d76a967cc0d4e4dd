"""Configuration management for the BRST workbench."""

import os
from typing import Optional

from pydantic import BaseModel, Field

# Try to load .env file if available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # python-dotenv not available, continue without it
    pass


LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Config(BaseModel):
    """Workbench configuration."""

    # Jet space
    max_jet_order: int = Field(default=8, description="Cap on on-demand jet order growth")
    ansatz_jet_order: int = Field(
        default=0, description="Highest jet order admitted in HPT ansatz monomials"
    )

    # Solver defaults
    degree_bound: int = Field(default=2, description="Default polynomial degree bound")
    target_rdeg: int = Field(default=4, description="Default HPT target resolution degree")

    # Logging
    log_level: str = Field(default="WARNING", description="Root level for brstbench loggers")
    log_json: bool = Field(default=False, description="Emit log records as JSON")


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except ValueError:
        return default


def load_config() -> Config:
    """Load configuration from environment variables."""
    config = Config()

    config.max_jet_order = _int_env("WORKBENCH_MAX_JET_ORDER", 8)
    config.ansatz_jet_order = _int_env("WORKBENCH_ANSATZ_JET_ORDER", 0)
    config.degree_bound = _int_env("WORKBENCH_DEGREE_BOUND", 2)
    config.target_rdeg = _int_env("WORKBENCH_TARGET_RDEG", 4)

    config.log_level = os.getenv("WORKBENCH_LOG_LEVEL", "WARNING").upper()
    config.log_json = os.getenv("WORKBENCH_LOG_JSON", "false").lower() in ("true", "1", "yes")

    return config


def validate_config(config: Config) -> None:
    """Validate configuration and raise an error if invalid."""
    for name in ("max_jet_order", "ansatz_jet_order", "degree_bound", "target_rdeg"):
        if getattr(config, name) < 0:
            raise ValueError(f"{name} must be non-negative, got {getattr(config, name)}")
    if config.max_jet_order < 1:
        raise ValueError("max_jet_order must allow at least first derivatives")
    if config.log_level not in LOG_LEVELS:
        raise ValueError(
            f"Unknown log level: {config.log_level}. "
            f"Supported levels: {', '.join(LOG_LEVELS)}"
        )


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reset_config() -> None:
    """Reset the global configuration (useful for testing)."""
    global _config
    _config = None
