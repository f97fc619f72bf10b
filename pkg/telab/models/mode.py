"""
Індекс моди: степінь сферичної гармоніки та поляризація
"""
from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class Polarization(str, Enum):
    """TE - електричне поле без радіальної компоненти; TM - магнітне"""

    TE = "TE"
    TM = "TM"


class ModeId(BaseModel):
    model_config = ConfigDict(frozen=True)

    degree: int = Field(ge=1)
    polarization: Polarization

    @property
    def weight(self) -> int:
        """Кратність 2n+1 (кількість порядків m)"""
        return 2 * self.degree + 1

    @property
    def nu2(self) -> int:
        """n(n+1)"""
        return self.degree * (self.degree + 1)

    def sort_key(self) -> tuple:
        return (self.degree, self.polarization.value)

    def __str__(self) -> str:
        return f"{self.polarization.value}{self.degree}"


def mode_list(n_min: int, n_max: int, polarizations=(Polarization.TE, Polarization.TM)) -> list:
    """Всі моди n_min..n_max у детермінованому порядку"""
    return [
        ModeId(degree=n, polarization=Polarization(p))
        for n in range(n_min, n_max + 1)
        for p in polarizations
    ]
