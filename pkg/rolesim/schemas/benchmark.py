from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

MAX_SEED = 2**64 - 1


class GenerationParams(BaseModel):
    """Edge probabilities and seed of one block-structured random graph."""

    model_config = ConfigDict(frozen=True)

    p_in: float = Field(..., ge=0.0, le=1.0, description="edge probability where G_B has an edge")
    p_out: float = Field(..., ge=0.0, le=1.0, description="edge probability elsewhere")
    seed: int = Field(0, ge=0, le=MAX_SEED)


class NoiseLevel(BaseModel):
    """One (p_in, p_out) setting of a noise panel."""

    model_config = ConfigDict(frozen=True)

    p_in: float = Field(..., ge=0.0, le=1.0)
    p_out: float = Field(..., ge=0.0, le=1.0)
