"""
Dispersion functions D_n^TE, D_n^TM on the ball.

TE means the electric field has no radial component. With
k1 = omega sqrt(eps mu), k2 = omega sqrt(eps_hat mu_hat):

    D^TE = sqrt(eps/mu) psi_n'(k1 R) psi_n(k2 R) - sqrt(eps_hat/mu_hat) psi_n'(k2 R) psi_n(k1 R)

D^TM is D^TE of the dual media (eps <-> mu on both sides). Zeros of D other
than omega = 0 are the transmission eigenvalues of the mode.

Both products carry the common factor omega^(2n+1); dividing it out gives the
reduced function G with G(0) != 0 under condition (H). Zero counting and
Newton refinement work on G, so high orders never underflow and the origin
never shows up as a zero.
"""
from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId, Polarization
from telab.models.records import DispersionValue
from telab.services.specfun import riccati_pair, riccati_scaled

TRACE_HEADER = ["n", "pol", "re_omega", "im_omega", "re_D", "im_D", "scale"]


def te_media(media: MediaConfig, mode: ModeId) -> MediaConfig:
    """Media seen by the TE-form formulas for this polarization"""
    return media if mode.polarization == Polarization.TE else media.dual()


def _constants(media: MediaConfig, mode: ModeId) -> Tuple[float, float, float, float]:
    m = te_media(media, mode)
    return m.admittance, m.admittance_hat, m.index, m.index_hat


# ============= RAW AND REDUCED FORMS =============


def dispersion_array(media: MediaConfig, mode: ModeId, omega) -> Tuple[np.ndarray, ...]:
    """
    Raw D with its scale and the scale-relative residual, vectorised over omega.

    Returns (D, scale, relative); relative comes from the reduced form so it
    stays meaningful where the raw products underflow.
    """
    y1, y2, n1, n2 = _constants(media, mode)
    omega = np.atleast_1d(np.asarray(omega, dtype=complex))
    r = media.radius
    psi1, dpsi1 = riccati_pair(mode.degree, n1 * omega * r)
    psi2, dpsi2 = riccati_pair(mode.degree, n2 * omega * r)
    t1 = y1 * dpsi1 * psi2
    t2 = y2 * dpsi2 * psi1
    _, _, relative = reduced_dispersion(media, mode, omega)
    return t1 - t2, np.maximum(np.abs(t1), np.abs(t2)), relative


def reduced_dispersion(
    media: MediaConfig, mode: ModeId, omega, derivative: bool = False
) -> Tuple[np.ndarray, ...]:
    """
    G(omega) = D(omega) / (C omega^(2n+1)), entire and nonzero at 0.

    Returns (G, scale, relative) or, with derivative=True,
    (G, scale, relative, dG/domega).
    """
    y1, y2, n1, n2 = _constants(media, mode)
    omega = np.atleast_1d(np.asarray(omega, dtype=complex))
    r = media.radius
    phi1, chi1, dphi1, dchi1 = riccati_scaled(mode.degree, n1 * omega * r)
    phi2, chi2, dphi2, dchi2 = riccati_scaled(mode.degree, n2 * omega * r)

    a = y1 * n2 * chi1 * phi2
    b = y2 * n1 * chi2 * phi1
    g = a - b
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(scale > 0, np.abs(g) / scale, 0.0)

    if not derivative:
        return g, scale, relative

    dg = r * (
        y1 * n2 * (n1 * dchi1 * phi2 + n2 * chi1 * dphi2)
        - y2 * n1 * (n2 * dchi2 * phi1 + n1 * chi2 * dphi1)
    )
    return g, scale, relative, dg


def reduced_at_origin(media: MediaConfig, mode: ModeId) -> float:
    """G(0) = Y1 n2 - Y2 n1; vanishes iff the permeability (TE) or permittivity (TM) contrast does"""
    y1, y2, n1, n2 = _constants(media, mode)
    return y1 * n2 - y2 * n1


# ============= OPERATIONS =============


def dispersion(media: MediaConfig, mode: ModeId, omega: complex) -> DispersionValue:
    value, scale, relative = dispersion_array(media, mode, omega)
    return DispersionValue(
        omega=complex(omega),
        mode=mode,
        value=complex(value[0]),
        scale=float(scale[0]),
        relative=float(relative[0]),
    )


def dispersion_trace(
    media: MediaConfig, mode: ModeId, start: complex, stop: complex, samples: int
) -> List[DispersionValue]:
    """Evenly spaced values of D on the segment [start, stop] (samples >= 2)"""
    if samples < 2:
        raise ValueError(f"dispersion_trace needs samples >= 2, got {samples}")
    omega = np.linspace(complex(start), complex(stop), samples)
    value, scale, relative = dispersion_array(media, mode, omega)
    return [
        DispersionValue(
            omega=complex(w), mode=mode, value=complex(v), scale=float(s), relative=float(q)
        )
        for w, v, s, q in zip(omega, value, scale, relative)
    ]


def trace_rows(values: Sequence[DispersionValue]) -> List[list]:
    return [
        [
            v.mode.degree,
            v.mode.polarization.value,
            v.omega.real,
            v.omega.imag,
            v.value.real,
            v.value.imag,
            v.scale,
        ]
        for v in values
    ]


def real_axis_zeros(
    media: MediaConfig,
    mode: ModeId,
    a: float,
    b: float,
    samples: int = 2000,
    xtol: float = 1e-14,
) -> List[float]:
    """
    Real zeros of D in (a, b] by sign changes of the reduced form plus brentq.

    D is real on the real axis, so this is an independent oracle for the
    real eigenvalues. Double zeros without a sign change are not seen.
    """
    x = np.linspace(a, b, samples)
    g = reduced_dispersion(media, mode, x)[0].real

    def f(t: float) -> float:
        return float(reduced_dispersion(media, mode, t)[0][0].real)

    zeros: List[float] = []
    for i in range(samples - 1):
        if g[i] == 0.0:
            zeros.append(float(x[i]))
        elif g[i] * g[i + 1] < 0:
            zeros.append(float(brentq(f, x[i], x[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)))
    if g[-1] == 0.0:
        zeros.append(float(x[-1]))

    logger.debug(f"{mode}: {len(zeros)} real zeros in ({a}, {b}]")
    return zeros


def floor_scan(media: MediaConfig, mode: ModeId, points) -> float:
    """min |D|/scale over the given points"""
    return float(reduced_dispersion(media, mode, points)[2].min())


def default_floor_contour(media: MediaConfig, samples: int = 200) -> np.ndarray:
    """Horizontal segment well above the real axis, where |D|/scale tends to the impedance contrast"""
    r = media.radius
    return np.linspace(complex(1.0, 6.0), complex(10.0, 6.0), samples) / r


def impedance_probe(
    media: MediaConfig,
    contrasts: Sequence[float],
    contour: Optional[np.ndarray] = None,
    mode: Optional[ModeId] = None,
) -> List[Tuple[float, float]]:
    """
    min over the contour of |D|/scale as eps_hat/mu_hat -> eps/mu.

    For each contrast c the second medium keeps eps_hat*mu_hat and gets
    eps_hat/mu_hat = (eps/mu)(1 + c). Returns [(c, min_relative), ...].
    """
    mode = mode or ModeId(degree=1, polarization=Polarization.TE)
    contour = default_floor_contour(media) if contour is None else np.asarray(contour)
    product = media.eps_hat * media.mu_hat
    ratio = media.eps / media.mu

    rows = []
    for c in contrasts:
        target = ratio * (1.0 + c)
        contrasted = MediaConfig.unchecked(
            media.eps,
            media.mu,
            math.sqrt(product * target),
            math.sqrt(product / target),
            media.radius,
        )
        rows.append((float(c), floor_scan(contrasted, mode, contour)))
    logger.debug(f"Impedance contrasts: {rows}")
    return rows
