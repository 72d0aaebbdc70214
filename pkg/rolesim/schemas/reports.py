"""Experiment outputs and their CSV layouts."""
from __future__ import annotations

from typing import Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

GAP_SLACK = 1e-9

RANK_SWEEP_COLUMNS = ["r", "full_gap", "step_norm"]
NMI_GRID_COLUMNS = ["p_in", "p_out", "nmi_full", "nmi_lowrank", "n_realizations"]
PANEL_COLUMNS = ["p_in", "p_out", "level", "n_clusters", "nmi", "knee"]
FLOAT_FORMAT = "%.17g"


class RankSweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=1)
    full_gap: float = Field(..., ge=0.0, description="||S* - S^(r)||_F")
    step_norm: float = Field(..., ge=0.0, description="||S^(r) - S^(r+1)||_F")


class RankSweepReport(BaseModel):
    rows: list[RankSweepRow]
    knee: Optional[int] = None
    full_norm: float = Field(0.0, ge=0.0, description="||S*||_F")

    @model_validator(mode="after")
    def check_rows(self) -> "RankSweepReport":
        ranks = [row.r for row in self.rows]
        if ranks != list(range(1, len(ranks) + 1)):
            raise ValueError("rank sweep rows must be contiguous from r=1")
        if self.knee is not None and self.knee not in ranks:
            raise ValueError("knee must be one of the swept ranks")
        return self

    def gap_increases(self) -> list[int]:
        """Ranks whose full_gap exceeds the previous one by more than the slack."""
        slack = GAP_SLACK * max(1.0, self.full_norm)
        return [
            current.r
            for previous, current in zip(self.rows, self.rows[1:])
            if current.full_gap > previous.full_gap + slack
        ]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.rows], columns=RANK_SWEEP_COLUMNS)

    def to_csv(self) -> str:
        knee = "none" if self.knee is None else str(self.knee)
        body = self.to_frame().to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return f"#knee {knee}\n{body}"


class NmiCell(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_in: float = Field(..., ge=0.0, le=1.0)
    p_out: float = Field(..., ge=0.0, le=1.0)
    nmi_full: float = Field(..., ge=0.0, le=1.0)
    nmi_lowrank: float = Field(..., ge=0.0, le=1.0)
    n_realizations: int = Field(..., ge=1)


class NmiGrid(BaseModel):
    step: float = Field(..., gt=0.0, le=1.0)
    cells: list[NmiCell]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([cell.model_dump() for cell in self.cells], columns=NMI_GRID_COLUMNS)

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    def cell(self, p_in: float, p_out: float) -> NmiCell:
        for candidate in self.cells:
            if abs(candidate.p_in - p_in) < 1e-9 and abs(candidate.p_out - p_out) < 1e-9:
                return candidate
        raise KeyError((p_in, p_out))

    def agreement_rate(self, tolerance: float = 0.1) -> float:
        """Share of cells where full and low-rank NMI differ by at most ``tolerance``."""
        if not self.cells:
            return 1.0
        close = sum(abs(c.nmi_full - c.nmi_lowrank) <= tolerance for c in self.cells)
        return close / len(self.cells)


class PanelRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_in: float
    p_out: float
    level: int = Field(..., ge=0)
    n_clusters: int = Field(..., ge=1)
    nmi: float = Field(..., ge=0.0, le=1.0)
    knee: Optional[int] = None


class NoisePanel(BaseModel):
    rows: list[PanelRow]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([row.model_dump() for row in self.rows], columns=PANEL_COLUMNS)
        frame["knee"] = frame["knee"].map(lambda value: "none" if pd.isna(value) else int(value))
        return frame

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
