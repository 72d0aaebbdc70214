from functools import lru_cache
from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_EXPERIMENTS_PATH = Path(__file__).resolve().parents[2] / "config" / "experiments.yaml"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="ROLESIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    debug: bool = False
    log_level: str = "INFO"
    log_format: str = "text"  # text | json

    # Parallelism for the experiment grid; --jobs overrides it
    jobs: int = 1
    default_seed: int = 0

    # Fixed-point iteration
    beta_safety_factor: float = 0.9
    tol: float = 1e-9
    max_iter: int = 10000

    # Power iteration for spectral radii
    power_tol: float = 1e-10
    power_max_iter: int = 20000

    # Role extraction / analysis
    rank: int = 10
    role_size: int = 50
    knee_threshold: float = 10.0

    # Size guards
    dense_guard: int = 5000
    sweep_guard: int = 2000

    experiments_config: Path = DEFAULT_EXPERIMENTS_PATH

    @field_validator("jobs")
    @classmethod
    def validate_jobs(cls, v: int) -> int:
        if v < 1:
            raise ValueError("jobs must be at least 1")
        return v

    @field_validator("beta_safety_factor")
    @classmethod
    def validate_safety_factor(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError("beta_safety_factor must lie in (0, 1]")
        return v

    @field_validator("tol", "power_tol")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        if v <= 0.0:
            raise ValueError("tolerances must be positive")
        return v

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        normalized = v.strip().lower()
        if normalized not in {"text", "json"}:
            raise ValueError("log_format must be 'text' or 'json'")
        return normalized


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
