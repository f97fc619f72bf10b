import math

import pytest

from telab.models.mode import ModeId, Polarization
from telab.utils.helpers import (
    jitter_fraction,
    least_upper_ratio,
    loglog_slope,
    mode_rng,
    safe_slope,
)


def test_loglog_slope_of_power_law():
    x = [1.0, 2.0, 4.0, 8.0]
    slope, intercept = loglog_slope(x, [3.0 * v**-2 for v in x])
    assert slope == pytest.approx(-2.0)
    assert intercept == pytest.approx(math.log(3.0))


def test_loglog_slope_skips_non_positive():
    slope, _ = loglog_slope([1.0, 2.0, 4.0], [0.0, 2.0, 4.0])
    assert slope == pytest.approx(1.0)


def test_safe_slope_returns_none():
    assert safe_slope([1.0, 2.0], [0.0, 0.0]) is None
    with pytest.raises(ValueError):
        loglog_slope([1.0], [1.0])


def test_mode_rng_is_per_mode():
    te = ModeId(degree=2, polarization=Polarization.TE)
    tm = ModeId(degree=2, polarization=Polarization.TM)
    assert mode_rng(1, te).random() == mode_rng(1, te).random()
    assert mode_rng(1, te).random() != mode_rng(1, tm).random()
    assert mode_rng(1, te).random() != mode_rng(1, te, salt=1).random()


def test_jitter_fraction_bounds(rng):
    values = [jitter_fraction(rng, 1e-4) for _ in range(200)]
    assert all(abs(v - 0.5) <= 1e-4 for v in values)
    assert len(set(values)) > 1


def test_least_upper_ratio_is_tight():
    t = [1.0, 2.0, 3.0]
    n = [1, 9, 30]
    c = least_upper_ratio(t, n)
    assert all(k <= c * s**3 for s, k in zip(t, n))
    assert c == pytest.approx(max(k / s**3 for s, k in zip(t, n)))
    assert least_upper_ratio([], []) == 0.0
