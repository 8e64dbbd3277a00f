"""
Configuration settings for FieldForge

This module defines all configuration settings for the library, the CLI and
the prediction service, loaded from ``FIELDFORGE_*`` environment variables
with sensible defaults.
"""

import os
from pathlib import Path
from typing import Any, Dict, List

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="FIELDFORGE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Data Configuration
    data_root: Path = Field(
        default=Path("data"),
        description="Root directory holding the label table and image folder"
    )

    labels_file: str = Field(
        default="train.csv",
        description="High-fidelity label table, relative to data_root"
    )

    images_dir: str = Field(
        default="images",
        description="High-fidelity image folder, relative to data_root"
    )

    mosaics_dir: str = Field(
        default="mosaics",
        description="Annotated mosaic PNG+CSV pairs used to fit the service identifier"
    )

    # Generation Defaults
    default_seed: int = Field(
        default=0,
        description="Seed used by stochastic commands when --seed is omitted"
    )

    max_workers: int = Field(
        default=1,
        ge=1,
        description="Worker threads for per-class synthesis and pipeline runs (1 = serial)"
    )

    identifier_iou: float = Field(
        default=0.5,
        gt=0,
        le=1,
        description="IoU threshold used to match identifier boxes to grid tiles"
    )

    wbf_iou: float = Field(
        default=0.55,
        gt=0,
        le=1,
        description="IoU threshold used by weighted boxes fusion during TTA"
    )

    # Application Configuration
    environment: str = Field(
        default="development",
        description="Application environment"
    )

    debug: bool = Field(
        default=False,
        description="Debug mode (re-raise errors in the CLI)"
    )

    # Logging Configuration
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)"
    )

    log_format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log message format"
    )

    # Server Configuration
    host: str = Field(
        default="0.0.0.0",
        description="Host to bind the prediction service to"
    )

    port: int = Field(
        default=8000,
        ge=1,
        le=65535,
        description="Port to bind the prediction service to"
    )

    workers: int = Field(
        default=2,
        description="Number of gunicorn worker processes"
    )

    cors_origins: List[str] = Field(
        default=["http://localhost:3000", "http://localhost:8000"],
        description="CORS allowed origins"
    )

    @field_validator("log_level")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {v!r}")
        return level

    @property
    def labels_path(self) -> Path:
        return self.data_root / self.labels_file

    @property
    def images_path(self) -> Path:
        return self.data_root / self.images_dir

    @property
    def mosaics_path(self) -> Path:
        return self.data_root / self.mosaics_dir

    @property
    def is_production(self) -> bool:
        """Check if the application is running in production mode"""
        return self.environment.lower() == "production"

    def get_logging_config(self) -> Dict[str, Any]:
        """Get logging configuration dictionary"""
        return {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "default": {
                    "format": self.log_format,
                },
            },
            "handlers": {
                "console": {
                    "level": self.log_level,
                    "class": "logging.StreamHandler",
                    "formatter": "default",
                    "stream": "ext://sys.stderr",
                },
                "file": {
                    "level": self.log_level,
                    "class": "logging.handlers.RotatingFileHandler",
                    "filename": "logs/fieldforge.log",
                    "maxBytes": 10485760,  # 10 MB
                    "backupCount": 5,
                    "formatter": "default",
                } if self.is_production else {
                    "class": "logging.NullHandler",
                },
            },
            "loggers": {
                "fieldforge": {
                    "handlers": ["console", "file"] if self.is_production else ["console"],
                    "level": self.log_level,
                    "propagate": False,
                },
                "uvicorn": {
                    "handlers": ["console"],
                    "level": self.log_level,
                    "propagate": False,
                },
            },
            "root": {
                "handlers": ["console"],
                "level": "WARNING",
            },
        }


# Global settings instance
settings = Settings()

# Ensure logs directory exists if in production
if settings.is_production and not os.path.exists("logs"):
    os.makedirs("logs")
