"""Application settings loaded from environment variables."""

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment settings, prefixed ``ARN_`` (e.g. ``ARN_CACHE_DIR``)."""

    model_config = SettingsConfigDict(
        env_prefix="ARN_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = Field(default="INFO", description="Logging level")
    cache_dir: Path = Field(default=Path(".arn_cache"), description="Dataset snapshot cache")
    config_dir: Path = Field(default=Path("config/base"), description="Directory of the base YAML files")
    workers: int = Field(default=1, ge=1, description="Default worker processes for evolve")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is one of the standard logging levels.

        Raises:
            ValueError: If log level is not valid
        """
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return v_upper


def get_settings() -> Settings:
    return Settings()
