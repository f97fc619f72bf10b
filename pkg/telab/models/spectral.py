"""
Спектральний параметр k, сектори та прямокутники пошуку
"""
from __future__ import annotations

import cmath
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from telab.errors import MagnitudeTooSmall, RegionError, SectorViolation


class SpectralParameter(BaseModel):
    """k з |Im(k^2)| >= gamma |k|^2 та |k| >= k_min"""

    model_config = ConfigDict(frozen=True)

    k: complex
    gamma: float = Field(gt=0)
    k_min: float = 0.0

    @property
    def sector_ratio(self) -> float:
        return sector_ratio(self.k)


def sector_ratio(z: complex) -> float:
    """|Im(z^2)| / |z|^2 (0 для z = 0)"""
    a = abs(z)
    if a == 0:
        return 0.0
    return abs((z * z).imag) / (a * a)


def ray_point(k_abs: float, arg_degrees: float) -> complex:
    return cmath.rect(k_abs, math.radians(arg_degrees))


def validate_k(k: complex, gamma: float, k_min: float = 0.0) -> SpectralParameter:
    """
    Raises:
        SectorViolation: |Im(k^2)| < gamma |k|^2
        MagnitudeTooSmall: |k| < k_min
    """
    if gamma <= 0:
        raise SectorViolation(f"gamma must be > 0, got {gamma}", gamma=gamma)
    k = complex(k)
    ratio = sector_ratio(k)
    # відносний допуск: k на промені 45° дає ratio = 1 - O(eps)
    if ratio < gamma * (1.0 - 1e-12):
        raise SectorViolation(
            f"|Im(k^2)|/|k|^2 = {ratio:.6g} < gamma = {gamma}",
            k=[k.real, k.imag],
            ratio=ratio,
            gamma=gamma,
        )
    if abs(k) < k_min:
        raise MagnitudeTooSmall(
            f"|k| = {abs(k):.6g} < k_min = {k_min}", k=[k.real, k.imag], k_min=k_min
        )
    return SpectralParameter(k=k, gamma=gamma, k_min=k_min)


class SectorSpec(BaseModel):
    """Сектор |Im(omega^2)| >= gamma |omega|^2, |omega| >= omega0"""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=0, le=2)
    omega0: float = Field(gt=0)


class Rectangle(BaseModel):
    model_config = ConfigDict(frozen=True)

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (
            self.re_min - pad <= z.real <= self.re_max + pad
            and self.im_min - pad <= z.imag <= self.im_max + pad
        )

    def boundary_distance(self, z: complex) -> float:
        """Відстань від z до межі прямокутника"""
        dx = max(self.re_min - z.real, 0.0, z.real - self.re_max)
        dy = max(self.im_min - z.imag, 0.0, z.imag - self.im_max)
        if dx > 0 or dy > 0:
            return math.hypot(dx, dy)
        return min(
            z.real - self.re_min, self.re_max - z.real, z.imag - self.im_min, self.im_max - z.imag
        )

    def negated(self) -> "Rectangle":
        return Rectangle(
            re_min=-self.re_max, re_max=-self.re_min, im_min=-self.im_max, im_max=-self.im_min
        )

    def conjugated(self) -> "Rectangle":
        return Rectangle(
            re_min=self.re_min, re_max=self.re_max, im_min=-self.im_max, im_max=-self.im_min
        )

    def split(self, fx: float = 0.5, fy: float = 0.5) -> list:
        """4 дочірні прямокутники; fx, fy - частка ширини/висоти лінії розрізу"""
        xm = self.re_min + fx * self.width
        ym = self.im_min + fy * self.height
        return [
            Rectangle(re_min=self.re_min, re_max=xm, im_min=self.im_min, im_max=ym),
            Rectangle(re_min=xm, re_max=self.re_max, im_min=self.im_min, im_max=ym),
            Rectangle(re_min=self.re_min, re_max=xm, im_min=ym, im_max=self.im_max),
            Rectangle(re_min=xm, re_max=self.re_max, im_min=ym, im_max=self.im_max),
        ]

    def shifted(self, dx0: float, dx1: float, dy0: float, dy1: float) -> "Rectangle":
        return Rectangle(
            re_min=self.re_min + dx0,
            re_max=self.re_max + dx1,
            im_min=self.im_min + dy0,
            im_max=self.im_max + dy1,
        )


class SearchRegion(BaseModel):
    """
    Прямокутник пошуку нулів.

    Межа прямокутника тримається на відстані >= delta0 від omega = 0; якщо
    початок координат всередині, його порядок віднімається при підрахунку.
    """

    model_config = ConfigDict(frozen=True)

    rectangle: Rectangle
    contour_samples: int = Field(default=64, ge=8)
    max_depth: int = Field(default=24, ge=1)
    delta0: float = Field(default=1e-3, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "SearchRegion":
        r = self.rectangle
        if not (r.width > 0 and r.height > 0):
            raise RegionError(
                "search rectangle has empty interior",
                rectangle=r.model_dump(),
            )
        if r.boundary_distance(0j) < self.delta0:
            raise RegionError(
                f"rectangle boundary passes within delta0={self.delta0} of omega=0",
                rectangle=r.model_dump(),
            )
        return self

    @classmethod
    def from_bounds(
        cls,
        re_min: float,
        re_max: float,
        im_min: float,
        im_max: float,
        radius: float = 1.0,
        **kwargs,
    ) -> "SearchRegion":
        kwargs.setdefault("delta0", 1e-3 / radius)
        return cls(
            rectangle=Rectangle(re_min=re_min, re_max=re_max, im_min=im_min, im_max=im_max),
            **kwargs,
        )

    def with_rectangle(self, rectangle: Rectangle) -> "SearchRegion":
        return SearchRegion(
            rectangle=rectangle,
            contour_samples=self.contour_samples,
            max_depth=self.max_depth,
            delta0=self.delta0,
        )

    def contains_origin(self) -> bool:
        return self.rectangle.contains(0j)
