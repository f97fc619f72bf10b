import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import spherical_jn

from telab.errors import OrderOverflow
from telab.services.specfun import (
    MAX_ORDER,
    riccati_pair,
    riccati_psi,
    riccati_scaled,
    series_oracle,
)


def test_order_zero_is_sine():
    ev = riccati_psi(0, math.pi)
    assert abs(ev.value) < 1e-15
    assert ev.derivative == pytest.approx(-1.0)


def test_order_one_closed_form():
    ev = riccati_psi(1, math.pi / 2)
    assert ev.value.real == pytest.approx(2.0 / math.pi, rel=1e-14)


def test_matches_series_off_axis():
    psi, dpsi = series_oracle(5, 2 + 1j)
    ev = riccati_psi(5, 2 + 1j)
    assert abs(ev.value - psi) <= 1e-12 * abs(psi)
    assert abs(ev.derivative - dpsi) <= 1e-12 * abs(dpsi)


def test_series_oracle_small_cases():
    psi, _ = series_oracle(0, 1.0)
    assert psi.real == pytest.approx(math.sin(1.0), abs=1e-14)
    assert series_oracle(1, 0.0) == (0j, 0j)
    psi3, dpsi3 = series_oracle(3, 1 + 1j)
    ev = riccati_psi(3, 1 + 1j)
    assert abs(ev.value - psi3) <= 1e-12 * abs(psi3)


def test_series_oracle_guards():
    with pytest.raises(ValueError):
        series_oracle(1, 1.0, terms=5)
    with pytest.raises(ValueError):
        series_oracle(1, 100.0)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 20, 40])
def test_both_branches_agree_with_series(n, rng):
    # |z| up to 8 crosses the series/Miller threshold for small n
    r = rng.uniform(0.5, 8.0, 20)
    theta = rng.uniform(-0.4, 0.4, 20)
    z = r * np.exp(1j * theta)
    psi, dpsi = riccati_pair(n, z)
    for zi, p, d in zip(z, psi, dpsi):
        sp, sd = series_oracle(n, zi, terms=80)
        assert abs(p - sp) <= 1e-10 * abs(sp)
        assert abs(d - sd) <= 1e-10 * abs(sd)


@pytest.mark.parametrize("n", [1, 3, 8, 15])
def test_three_term_recurrence(n, rng):
    z = rng.uniform(0.5, 20.0, 50) + 1j * rng.uniform(-2.0, 2.0, 50)
    lower = riccati_pair(n - 1, z)[0]
    upper = riccati_pair(n + 1, z)[0]
    middle = riccati_pair(n, z)[0]
    lhs = lower + upper
    rhs = (2 * n + 1) / z * middle
    scale = np.maximum.reduce([np.abs(lower), np.abs(upper), np.abs(rhs)])
    assert np.all(np.abs(lhs - rhs) <= 1e-10 * scale)


@pytest.mark.parametrize("n", [0, 1, 2, 7])
def test_parity(n, rng):
    z = rng.uniform(0.5, 15.0, 30) + 1j * rng.uniform(-3.0, 3.0, 30)
    psi, dpsi = riccati_pair(n, z)
    psi_neg, dpsi_neg = riccati_pair(n, -z)
    assert_allclose(psi_neg, (-1) ** (n + 1) * psi, rtol=1e-10)
    assert_allclose(dpsi_neg, (-1) ** n * dpsi, rtol=1e-10)


def test_scaled_form_at_origin():
    phi, chi, dphi, dchi = riccati_scaled(30, [0.0])
    assert phi[0] == 1.0
    assert chi[0] == 1.0
    assert dphi[0] == 0.0
    assert dchi[0] == 0.0


def test_scaled_form_does_not_underflow():
    phi, chi, _, _ = riccati_scaled(200, [1e-3, 0.5, 5.0])
    assert np.all(np.isfinite(phi))
    assert np.all(np.abs(phi - 1.0) < 0.05)
    assert np.all(np.isfinite(chi))


def test_order_overflow():
    with pytest.raises(OrderOverflow) as exc:
        riccati_pair(MAX_ORDER + 1, 1.0)
    assert exc.value.details["max_order"] == MAX_ORDER
    with pytest.raises(OrderOverflow):
        riccati_scaled(-1, 1.0)


@pytest.mark.parametrize("n", [1, 4, 10])
def test_real_axis_agrees_with_scipy(n):
    x = np.linspace(0.5, 20.0, 60)
    psi, dpsi = riccati_pair(n, x)
    jn = spherical_jn(n, x)
    assert_allclose(psi.real, x * jn, rtol=1e-10, atol=1e-12)
    assert_allclose(dpsi.real, jn + x * spherical_jn(n, x, derivative=True), rtol=1e-10, atol=1e-12)
    assert np.all(np.abs(psi.imag) <= 1e-12 * np.abs(psi).max())
