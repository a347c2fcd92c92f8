"""
Process-wide settings read from the environment (prefix HORMANDER_) or a .env file
"""
from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="HORMANDER_",
        env_file=".env",
        extra="ignore",
    )

    # Memory and cost guards
    memory_budget_bytes: int = Field(default=2 * 1024**3, gt=0)
    direct_eval_ceiling: int = Field(default=2**32, gt=0)

    # Parallelism
    threads: int = Field(default=1, ge=1)
    fft_workers: int = Field(default=1, ge=1)

    # Logging
    log_level: str = "INFO"
    log_json: bool = False

    # x-probe sets for symbol norms
    probe_limit: int = Field(default=2**14, gt=0)
    probe_subsample: int = Field(default=2**12, gt=0)

    # Region predicates
    boundary_band: float = Field(default=1e-12, ge=0.0)

    # Empirical constants
    calibration_path: Path = Path("calibration/baselines.json")
    calibration_drift: float = Field(default=0.05, ge=0.0)


@lru_cache()
def get_settings() -> Settings:
    """Cached settings instance"""
    return Settings()
