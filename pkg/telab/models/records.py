"""
Результати: значення дисперсійної функції, знайдені власні значення, звіт
функції підрахунку
"""
from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from telab.models.mode import ModeId

RESIDUAL_CEILING = 1e-8
"""Найбільший залишок |D|/scale, з яким власне значення вважається знайденим"""


class DispersionValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega: complex
    mode: ModeId
    value: complex
    scale: float = Field(ge=0)
    relative: float = Field(ge=0)
    """|D|/scale, пораховане у зведеній формі (без спільного множника omega^(2n+1))"""


class EigenRecord(BaseModel):
    """Одне трансмісійне власне значення omega моди mode"""

    model_config = ConfigDict(frozen=True)

    omega: complex
    mode: ModeId
    zero_order: int = Field(ge=1)
    multiplicity: int
    residual: float = Field(ge=0)
    refinement_iters: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _consistency(self) -> "EigenRecord":
        if not self.residual <= RESIDUAL_CEILING:
            raise ValueError(f"residual {self.residual:.3e} above {RESIDUAL_CEILING:.0e}")
        expected = self.zero_order * self.mode.weight
        if self.multiplicity != expected:
            raise ValueError(
                f"multiplicity {self.multiplicity} != zero_order*(2n+1) = {expected}"
            )
        return self

    @classmethod
    def build(cls, omega: complex, mode: ModeId, zero_order: int, residual: float, iters: int = 0):
        return cls(
            omega=omega,
            mode=mode,
            zero_order=zero_order,
            multiplicity=zero_order * mode.weight,
            residual=residual,
            refinement_iters=iters,
        )

    def sort_key(self) -> tuple:
        return (
            self.mode.degree,
            self.mode.polarization.value,
            round(abs(self.omega), 10),
            round(self.omega.real, 10),
            round(self.omega.imag, 10),
        )


class UnresolvedLeaf(BaseModel):
    """Лист підрозбиття, де уточнення не вдалося; ніколи не відкидається мовчки"""

    model_config = ConfigDict(frozen=True)

    mode: ModeId
    center: complex
    half_width: float
    count: int
    reason: str


class SectorAuditRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: float
    omega0: float
    violations: int


class CountingReport(BaseModel):
    media: dict
    t_grid: List[float]
    counts: List[int]
    fitted_slope: Optional[float]
    fitted_c: float = Field(ge=0)
    truncation_degree: int = Field(ge=1)
    truncation_retries: int = Field(default=0, ge=0)
    unresolved: int = Field(default=0, ge=0)
    sector_audit: List[SectorAuditRow] = Field(default_factory=list)

    @model_validator(mode="after")
    def _invariants(self) -> "CountingReport":
        if len(self.t_grid) != len(self.counts):
            raise ValueError("t_grid and counts differ in length")
        if any(b < a for a, b in zip(self.counts, self.counts[1:])):
            raise ValueError("counts must be nondecreasing")
        if any(n < 0 for n in self.counts):
            raise ValueError("counts must be non-negative")
        if any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise ValueError("t_grid must be strictly increasing")
        if any(t <= 0 for t in self.t_grid):
            raise ValueError("t_grid must be positive")
        return self

    def bound_holds(self) -> bool:
        """N(t) <= c t^3 на всій сітці (цілі лічильники, без допуску)"""
        return all(n <= self.fitted_c * t**3 for t, n in zip(self.t_grid, self.counts))
