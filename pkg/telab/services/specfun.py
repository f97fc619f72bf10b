"""
Riccati-Bessel functions psi_n(z) = z j_n(z) for complex arguments.

Two evaluation branches, chosen per element of z:
    * ascending power series for |z| < max(4, n/2)
    * Miller downward recurrence for j_n, normalised against j_0 = sin(z)/z
      (or j_1 where j_0 is close to a zero)

Only first-kind functions are needed: both field families are regular at
the origin. Accuracy is certified against `series_oracle` for n <= 40;
orders up to MAX_ORDER are supported for the mode sweeps of the counting run.

`riccati_scaled` returns psi_n and psi_n' with the z^(n+1)/(2n+1)!! origin
behaviour divided out, so high orders near the origin do not underflow.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from telab.errors import OrderOverflow

MAX_ORDER = 400
CERTIFIED_ORDER = 40
MAX_SERIES_TERMS = 600


class RiccatiEval(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: complex
    derivative: complex
    order: int = Field(ge=0)
    argument: complex


def _check_order(n: int) -> None:
    if n < 0 or n > MAX_ORDER:
        raise OrderOverflow(
            f"Riccati order n={n} outside supported range 0..{MAX_ORDER}",
            order=n,
            max_order=MAX_ORDER,
        )


def log_double_factorial(n: int) -> float:
    """log((2n+1)!!)"""
    return math.lgamma(2 * n + 2) - n * math.log(2.0) - math.lgamma(n + 1)


def series_threshold(n: int) -> float:
    return max(4.0, 0.5 * n)


# ============= SERIES BRANCH =============


def _series_scaled(n: int, z: np.ndarray) -> Tuple[np.ndarray, ...]:
    """
    phi = sum b_j z^2j, chi = sum b_j (n+1+2j)/(n+1) z^2j, b_0 = 1,
    plus both z-derivatives
    """
    z2 = z * z
    term = np.ones_like(z)
    dterm = np.zeros_like(z)
    phi = term.copy()
    chi = term.copy()
    dphi = np.zeros_like(z)
    dchi = np.zeros_like(z)
    peak = np.ones(z.shape)

    for j in range(1, MAX_SERIES_TERMS):
        factor = -0.5 / (j * (2 * n + 2 * j + 1))
        # dterm = b_j z^(2j-1), built from the previous term to avoid dividing by z
        dterm = term * z * factor
        term = term * z2 * factor
        weight = (n + 1 + 2 * j) / (n + 1)
        phi += term
        chi += weight * term
        dphi += 2 * j * dterm
        dchi += 2 * j * weight * dterm

        size = np.abs(term)
        peak = np.maximum(peak, size)
        if j > 2 and np.all(size <= 1e-17 * peak):
            break

    return phi, chi, dphi, dchi


# ============= MILLER BRANCH =============


def _miller_pair(n: int, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """psi_n and psi_n' for |z| >= 4 (n >= 1)"""
    az = float(np.abs(z).max())
    start = int(max(n, az) + 10.0 * az ** (1.0 / 3.0) + 40)

    j_hi = np.zeros_like(z)
    j_cur = np.full_like(z, 1e-30)
    keep_n = np.zeros_like(z)
    keep_nm1 = np.zeros_like(z)
    keep_1 = np.zeros_like(z)

    for k in range(start, 0, -1):
        j_lo = (2 * k + 1) / z * j_cur - j_hi
        j_hi, j_cur = j_cur, j_lo
        m = k - 1
        if m == n:
            keep_n = j_cur.copy()
        if m == n - 1:
            keep_nm1 = j_cur.copy()
        if m == 1:
            keep_1 = j_cur.copy()

        big = np.abs(j_cur) > 1e200
        if big.any():
            s = np.where(big, 1e-200, 1.0)
            j_cur = j_cur * s
            j_hi = j_hi * s
            keep_n = keep_n * s
            keep_nm1 = keep_nm1 * s
            keep_1 = keep_1 * s

    # j_cur is now the recurrence value of j_0
    sin_z = np.sin(z)
    j0 = sin_z / z
    j1 = sin_z / (z * z) - np.cos(z) / z
    use_j0 = np.abs(j_cur) >= np.abs(keep_1)
    with np.errstate(divide="ignore", invalid="ignore"):
        norm = np.where(use_j0, j0 / j_cur, j1 / keep_1)

    jn = keep_n * norm
    jnm1 = keep_nm1 * norm
    return z * jn, z * jnm1 - n * jn


# ============= PUBLIC SURFACE =============


def _log_q(n: int, z: np.ndarray) -> np.ndarray:
    """log(z^n / (2n+1)!!), z != 0"""
    return n * np.log(z) - log_double_factorial(n)


def riccati_scaled(n: int, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Scaled Riccati pair and its derivatives.

    With q = z^n / (2n+1)!!:
        psi_n(z)  = z q phi(z)
        psi_n'(z) = (n+1) q chi(z)
    phi(0) = chi(0) = 1. Returns (phi, chi, dphi/dz, dchi/dz) as arrays.

    Raises:
        OrderOverflow: n > MAX_ORDER
    """
    _check_order(n)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    phi = np.empty_like(z)
    chi = np.empty_like(z)
    dphi = np.empty_like(z)
    dchi = np.empty_like(z)

    small = np.abs(z) < series_threshold(n)
    if small.any():
        phi[small], chi[small], dphi[small], dchi[small] = _series_scaled(n, z[small])

    large = ~small
    if large.any():
        zl = z[large]
        if n == 0:
            psi, dpsi = np.sin(zl), np.cos(zl)
        else:
            psi, dpsi = _miller_pair(n, zl)
        inv_q = np.exp(-_log_q(n, zl))
        p = psi * inv_q / zl
        c = dpsi * inv_q / (n + 1)
        phi[large] = p
        chi[large] = c
        dphi[large] = (n + 1) * (c - p) / zl
        dchi[large] = n * (p - c) / zl - zl * p / (n + 1)

    return phi, chi, dphi, dchi


def riccati_pair(n: int, z) -> Tuple[np.ndarray, np.ndarray]:
    """
    psi_n(z), psi_n'(z) as arrays (vectorised over z)

    Raises:
        OrderOverflow: n > MAX_ORDER
    """
    _check_order(n)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if n == 0:
        return np.sin(z), np.cos(z)

    phi, chi, _, _ = riccati_scaled(n, z)
    q = np.zeros_like(z)
    nz = z != 0
    q[nz] = np.exp(_log_q(n, z[nz]))
    return z * q * phi, (n + 1) * q * chi


def riccati_psi(n: int, z: complex) -> RiccatiEval:
    """
    Одна точка: psi_n(z) та psi_n'(z)

    Raises:
        OrderOverflow: n > MAX_ORDER
    """
    psi, dpsi = riccati_pair(n, z)
    return RiccatiEval(value=complex(psi[0]), derivative=complex(dpsi[0]), order=n, argument=z)


def series_oracle(n: int, z: complex, terms: int = 30) -> Tuple[complex, complex]:
    """
    Truncated ascending series for psi_n and psi_n' (test oracle only).

    psi_n(z) = sum_j a_j z^(n+1+2j), a_j = (-1/2)^j / (j! (2n+2j+1)!!)
    """
    if terms < 10:
        raise ValueError(f"series_oracle needs terms >= 10, got {terms}")
    z = complex(z)
    if abs(z) > 2 * n + 20:
        raise ValueError(f"|z| = {abs(z):.4g} outside the series comfort zone |z| <= {2 * n + 20}")

    a = math.exp(-log_double_factorial(n))
    psi = 0j
    dpsi = 0j
    for j in range(terms):
        if j > 0:
            a *= -0.5 / (j * (2 * n + 2 * j + 1))
        psi += a * z ** (n + 1 + 2 * j)
        dpsi += a * (n + 1 + 2 * j) * z ** (n + 2 * j)
    return psi, dpsi
