"""Configuration management for the SYZ real Lagrangian toolkit."""

import logging
import sys
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

REFINEMENT_KINDS = ("dual", "quad", "simplicial")


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Output
    output_dir: str = Field(
        default="./results",
        description="Directory receiving reports and emitted matrices"
    )
    emit_matrices_dir: Optional[str] = Field(
        default=None,
        description="Dump every differential in the gf2 text format into this directory"
    )

    # Computation
    threads: int = Field(default=1, description="Worker threads for rank computations")
    seed: int = Field(default=0, description="Seed for randomized checks")
    refinement: str = Field(
        default="dual",
        description="Cell structure used for sheaf cohomology (dual, quad, simplicial)"
    )
    form_path: Optional[str] = Field(
        default=None,
        description="Intersection form file used by the square route"
    )
    show_progress: bool = Field(default=True, description="Show tqdm progress bars")

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format"
    )

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        """Thread count must be positive."""
        if v < 1:
            raise ValueError("threads must be at least 1")
        return v

    @field_validator("refinement")
    @classmethod
    def validate_refinement(cls, v: str) -> str:
        """Refinement must name a known cell structure."""
        if v not in REFINEMENT_KINDS:
            raise ValueError(f"refinement must be one of {REFINEMENT_KINDS}, got {v!r}")
        return v


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get application settings."""
    return settings


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging from settings; logs go to stderr."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format=settings.log_format,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
