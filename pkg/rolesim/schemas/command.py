"""Validated command-line configurations, one model per subcommand."""
from __future__ import annotations

from pathlib import Path
from typing import Annotated, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

from rolesim.schemas.benchmark import MAX_SEED


def _parse_sizes(value: object) -> object:
    if isinstance(value, str):
        tokens = [token.strip() for token in value.split(",") if token.strip()]
        if not tokens:
            raise ValueError("sizes must list at least one role size")
        return [int(token) for token in tokens]
    return value


def _parse_beta(value: object) -> object:
    if value is None or (isinstance(value, str) and value.strip().lower() == "auto"):
        return None
    return value


Sizes = Annotated[list[int], BeforeValidator(_parse_sizes)]
PositiveFloat = Annotated[float, Field(gt=0.0)]
Beta = Annotated[Optional[PositiveFloat], BeforeValidator(_parse_beta)]


class CommandConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str


class GenerateConfig(CommandConfig):
    model: str = Field(..., min_length=1)
    sizes: Sizes = Field(..., min_length=1)
    p_in: float = Field(..., ge=0.0, le=1.0)
    p_out: float = Field(..., ge=0.0, le=1.0)
    seed: int = Field(0, ge=0, le=MAX_SEED)
    out_prefix: Path

    @field_validator("sizes")
    @classmethod
    def validate_sizes(cls, v: list[int]) -> list[int]:
        if any(size < 1 for size in v):
            raise ValueError("role sizes must be positive")
        return v


class SimilarityConfig(CommandConfig):
    graph: Path
    rank: Optional[int] = Field(None, ge=1)
    full: bool = False
    beta: Beta = None
    force: bool = False
    tol: Optional[float] = Field(None, gt=0.0)
    max_iter: Optional[int] = Field(None, ge=1)
    out: Path
    materialize: Optional[Path] = None

    @model_validator(mode="after")
    def check_mode(self) -> "SimilarityConfig":
        if self.full == (self.rank is not None):
            raise ValueError("exactly one of --rank and --full is required")
        if self.full and self.materialize is not None:
            raise ValueError("--materialize only applies to low-rank factors")
        return self


class RolesConfig(CommandConfig):
    graph: Path
    rank: Optional[int] = Field(None, ge=1)
    full: bool = False
    beta: Beta = None
    force: bool = False
    resolution: float = Field(1.0, gt=0.0)
    seed: int = Field(0, ge=0)
    out_prefix: Path

    @model_validator(mode="after")
    def check_mode(self) -> "RolesConfig":
        if self.full and self.rank is not None:
            raise ValueError("--full and --rank are mutually exclusive")
        return self


class RankSweepConfig(CommandConfig):
    graph: Path
    rmax: int = Field(..., ge=1)
    beta: Beta = None
    tol: Optional[float] = Field(None, gt=0.0)
    out: Optional[Path] = None


class EvaluateConfig(CommandConfig):
    a: Path
    b: Path


class ModelConfig(CommandConfig):
    """Shared by the commands that generate their own benchmark graphs."""

    model: str = Field(..., min_length=1)
    sizes: Optional[Sizes] = None
    role_size: int = Field(50, ge=1)
    rank: int = Field(10, ge=1)
    seed: int = Field(0, ge=0)
    out: Optional[Path] = None


class ExperimentConfig(ModelConfig):
    step: float = Field(0.05, gt=0.0, le=1.0)
    realizations: int = Field(20, ge=1)
    jobs: int = Field(1, ge=1)


class PanelConfig(ModelConfig):
    rmax: int = Field(6, ge=1)
    config: Optional[Path] = None
