"""
Configuration settings for the process variant fingerprint toolkit.

This module provides centralized configuration management using Pydantic settings
with support for environment variables, a `.env` file and default values.
Command-line flags override whatever is resolved here.
"""

import os

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class LoggingSettings(BaseModel):
    """Logging configuration."""

    level: str = Field(
        default="INFO",
        description="Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    format: str = Field(
        default="structured",
        description="Log format (simple, structured, json)",
    )
    file_path: str | None = Field(
        default=None,
        description="Log file path (console only when unset)",
    )
    max_file_size: int = Field(
        default=10 * 1024 * 1024,  # 10MB
        description="Maximum log file size in bytes",
    )
    backup_count: int = Field(
        default=5,
        description="Number of backup log files to keep",
    )

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        """Validate log level name."""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level '{v}'")
        return level

    @field_validator("format")
    @classmethod
    def validate_format(cls, v: str) -> str:
        """Validate log format name."""
        if v not in {"simple", "structured", "json"}:
            raise ValueError(f"Unknown log format '{v}'")
        return v


class ClassifierSettings(BaseModel):
    """Kernel classifier hyperparameters."""

    C: float = Field(default=1.0, gt=0, description="Box constraint")
    gamma: str = Field(
        default="scale",
        description="RBF kernel width: 'scale' or a positive number",
    )
    tol: float = Field(default=1e-3, gt=0, description="KKT tolerance")
    max_passes: int = Field(
        default=100,
        ge=1,
        description="Solver iteration cap, in passes over the training set",
    )

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v: str) -> str:
        """Accept 'scale' or a positive float literal."""
        if v == "scale":
            return v
        try:
            value = float(v)
        except ValueError:
            raise ValueError(f"gamma must be 'scale' or a number, got '{v}'")
        if value <= 0:
            raise ValueError("gamma must be positive")
        return v


class SelectionSettings(BaseModel):
    """Feature selection parameters."""

    alpha: float = Field(default=0.05, gt=0, lt=1, description="Significance level")
    k_folds: int = Field(default=10, ge=2, description="Cross-validation folds")
    min_instances_per_class: int = Field(
        default=10,
        ge=2,
        description="Minimum unit-containing traces per variant before testing",
    )
    fdr: bool = Field(
        default=False,
        description="Apply Benjamini-Hochberg control across candidates",
    )
    features: str = Field(
        default="edges",
        description="Feature kind to analyse (events or edges)",
    )


class OutputSettings(BaseModel):
    """Artifact output configuration."""

    directory: str = Field(default="fingerprint_out", description="Output directory")
    float_format: str = Field(
        default="%.6g",
        description="printf-style float format for CSV reports",
    )


class Settings(BaseSettings):
    """
    Main application settings.

    Configuration values are loaded from environment variables with fallback to
    defaults. Environment variables are prefixed with 'FINGERPRINT_'; nested groups
    use a double underscore, e.g. FINGERPRINT_SELECTION__ALPHA=0.01.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="FINGERPRINT_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    # Application metadata
    app_name: str = Field(
        default="Process Variant Fingerprints",
        description="Application name",
    )
    version: str = Field(
        default="1.0.0",
        description="Application version",
    )

    # Reproducibility and parallelism
    seed: int = Field(default=42, description="Master random seed")
    threads: int = Field(
        default=0,
        ge=0,
        description="Worker threads for candidate evaluation (0 = available cores)",
    )

    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    classifier: ClassifierSettings = Field(default_factory=ClassifierSettings)
    selection: SelectionSettings = Field(default_factory=SelectionSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    def resolved_threads(self) -> int:
        """Number of worker threads to use."""
        return self.threads or (os.cpu_count() or 1)


# Create settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get application settings instance."""
    return settings
