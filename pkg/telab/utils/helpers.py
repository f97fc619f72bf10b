"""
Допоміжні функції: лог-лог апроксимація, детерміновані випадкові послідовності
"""
from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from telab.models.mode import ModeId, Polarization


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """
    Least-squares fit log y = slope * log x + intercept

    Returns (slope, intercept); needs at least two positive points.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        raise ValueError("log-log fit needs at least two positive points")
    slope, intercept = np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)
    return float(slope), float(intercept)


def safe_slope(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """Як loglog_slope, але None замість помилки"""
    try:
        return loglog_slope(x, y)[0]
    except ValueError:
        return None


def mode_rng(seed: int, mode: ModeId, salt: int = 0) -> np.random.Generator:
    """Окремий генератор на моду: результат не залежить від порядку виконання"""
    pol = 0 if mode.polarization == Polarization.TE else 1
    return np.random.default_rng([seed, mode.degree, pol, salt])


def jitter_fraction(rng: np.random.Generator, relative: float = 1e-4) -> float:
    """0.5 + зсув у межах +-relative (частка лінії розрізу прямокутника)"""
    return 0.5 + relative * (2.0 * rng.random() - 1.0)


def least_upper_ratio(t_grid: Iterable[float], counts: Iterable[int], power: int = 3) -> float:
    """
    Найменше c (з точністю до одного ulp) таке, що counts[i] <= c * t[i]^power
    точно в арифметиці з плаваючою комою
    """
    pairs = list(zip(t_grid, counts))
    c = max((n / t**power for t, n in pairs), default=0.0)
    while not all(n <= c * t**power for t, n in pairs):
        c = math.nextafter(c, math.inf)
    return c
