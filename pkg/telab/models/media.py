"""
Середовища: чотири сталі ізотропні коефіцієнти та радіус кулі
"""
from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field

from telab.config import settings
from telab.errors import ConditionHViolated, NonElliptic


class MediaConfig(BaseModel):
    """
    eps, mu - всередині першої системи; eps_hat, mu_hat - другої.

    Створюйте через validate_media(); MediaConfig.unchecked() лише для
    проб, де умову (H) порушено навмисно.
    """

    model_config = ConfigDict(frozen=True)

    eps: float
    mu: float
    eps_hat: float
    mu_hat: float
    radius: float = Field(default=1.0)

    @classmethod
    def unchecked(cls, eps: float, mu: float, eps_hat: float, mu_hat: float, radius: float = 1.0):
        return cls.model_construct(eps=eps, mu=mu, eps_hat=eps_hat, mu_hat=mu_hat, radius=radius)

    # ============= ПОХІДНІ ВЕЛИЧИНИ =============

    @property
    def index(self) -> float:
        """sqrt(eps*mu)"""
        return math.sqrt(self.eps * self.mu)

    @property
    def index_hat(self) -> float:
        return math.sqrt(self.eps_hat * self.mu_hat)

    @property
    def admittance(self) -> float:
        """sqrt(eps/mu)"""
        return math.sqrt(self.eps / self.mu)

    @property
    def admittance_hat(self) -> float:
        return math.sqrt(self.eps_hat / self.mu_hat)

    @property
    def max_index(self) -> float:
        return max(self.index, self.index_hat)

    @property
    def min_index(self) -> float:
        return min(self.index, self.index_hat)

    def default_k_min(self) -> float:
        return 4.0 / (self.radius * self.min_index)

    def default_k_abs(self) -> float:
        return 10.0 / (self.radius * math.sqrt(min(self.eps * self.mu, self.eps_hat * self.mu_hat)))

    def dual(self) -> "MediaConfig":
        """(eps, mu) <-> (mu, eps) на обох сторонах: TM-блок як TE-блок"""
        return self.model_construct(
            eps=self.mu, mu=self.eps, eps_hat=self.mu_hat, mu_hat=self.eps_hat, radius=self.radius
        )

    def swapped(self) -> "MediaConfig":
        """Обмін ролями двох систем"""
        return self.model_construct(
            eps=self.eps_hat, mu=self.mu_hat, eps_hat=self.eps, mu_hat=self.mu, radius=self.radius
        )

    def as_dict(self) -> dict:
        return {
            "eps": self.eps,
            "mu": self.mu,
            "eps_hat": self.eps_hat,
            "mu_hat": self.mu_hat,
            "radius": self.radius,
        }


def _close(a: float, b: float, margin: float) -> bool:
    return abs(a - b) <= margin * max(abs(a), abs(b))


def validate_media(
    eps: float,
    mu: float,
    eps_hat: float,
    mu_hat: float,
    radius: float = 1.0,
    margin: float | None = None,
) -> MediaConfig:
    """
    Перевіряє еліптичність та умову (H)

    Raises:
        NonElliptic: коефіцієнт або радіус <= 0
        ConditionHViolated: clause = "eps", "mu" або "eps/mu"
    """
    margin = settings.CONDITION_H_MARGIN if margin is None else margin

    for field, value in (
        ("eps", eps),
        ("mu", mu),
        ("eps_hat", eps_hat),
        ("mu_hat", mu_hat),
        ("radius", radius),
    ):
        if not math.isfinite(value) or value <= 0:
            raise NonElliptic(field, value)

    if _close(eps, eps_hat, margin):
        raise ConditionHViolated("eps", eps, eps_hat, margin)
    if _close(mu, mu_hat, margin):
        raise ConditionHViolated("mu", mu, mu_hat, margin)
    if _close(eps / mu, eps_hat / mu_hat, margin):
        raise ConditionHViolated("eps/mu", eps / mu, eps_hat / mu_hat, margin)

    return MediaConfig(eps=eps, mu=mu, eps_hat=eps_hat, mu_hat=mu_hat, radius=radius)
