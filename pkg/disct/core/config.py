"""
File: config.py
Description: Runtime settings for the disct CLI and experiment runners.
             Values come from DISCT_* environment variables or a local .env file;
             command-line flags override them.
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Project Metadata
    project_name: str = "DisCT"

    # Logging / error reporting
    log_level: str = "INFO"
    sentry_dsn: str = ""  # Optional if Sentry is configured to capture errors
    sentry_environment: str = "development"

    # Data ingestion
    discrete_threshold: int = Field(
        default=20, ge=1, description="Max distinct values for a column to be inferred as discretized"
    )

    # Testing defaults
    alpha: float = Field(default=0.05, gt=0, lt=1)
    pc_max_depth: Optional[int] = Field(default=None, ge=0)

    # Experiment defaults
    replicates: int = Field(default=500, ge=1)
    calibration_replicates: int = Field(default=1000, ge=1)
    discovery_seeds: int = Field(default=10, ge=1)
    base_seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="DISCT_", env_file=".env", env_file_encoding="utf-8"
    )


settings = Settings()
