"""
Checks over located eigenvalues: eigenvalue-free sector, Schatten tail sums
and the orbit symmetry omega -> -omega, conj(omega), -conj(omega).
"""
from __future__ import annotations

import cmath
import math
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId
from telab.models.records import EigenRecord, SectorAuditRow
from telab.models.spectral import SectorSpec, SpectralParameter, sector_ratio
from telab.services.modeop.grid import RadialGrid
from telab.services.modeop.norms import hs_norm
from telab.services.modeop.operator import build_mode_operator
from telab.utils.helpers import safe_slope

EIGEN_HEADER = [
    "n",
    "pol",
    "re_omega",
    "im_omega",
    "zero_order",
    "multiplicity",
    "residual",
    "ratio_im_omega2",
]


def eigen_rows(records: Sequence[EigenRecord]) -> List[list]:
    return [
        [
            r.mode.degree,
            r.mode.polarization.value,
            r.omega.real,
            r.omega.imag,
            r.zero_order,
            r.multiplicity,
            r.residual,
            sector_ratio(r.omega),
        ]
        for r in sorted(records, key=EigenRecord.sort_key)
    ]


# ============= СЕКТОР =============


class SectorAudit(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: SectorSpec
    ratios: List[float]
    """|Im(omega^2)|/|omega|^2 для кожного запису, в порядку вхідного списку"""
    violations: List[EigenRecord]

    def row(self) -> SectorAuditRow:
        return SectorAuditRow(
            gamma=self.spec.gamma, omega0=self.spec.omega0, violations=len(self.violations)
        )


def sector_audit(records: Sequence[EigenRecord], spec: SectorSpec) -> SectorAudit:
    ratios = [sector_ratio(r.omega) for r in records]
    violations = [
        r
        for r, q in zip(records, ratios)
        if q >= spec.gamma and abs(r.omega) >= spec.omega0
    ]
    if violations:
        logger.warning(
            f"⚠️  {len(violations)} власних значень у секторі gamma={spec.gamma}, "
            f"omega0={spec.omega0}"
        )
    return SectorAudit(spec=spec, ratios=ratios, violations=violations)


# ============= SCHATTEN =============


def schatten_partial_sum(records: Sequence[EigenRecord], k: complex) -> float:
    """sum over records of multiplicity * |i omega - k|^-4"""
    return float(sum(r.multiplicity / abs(1j * r.omega - k) ** 4 for r in records))


def frobenius_bound(
    media: MediaConfig, modes: Sequence[ModeId], sp: SpectralParameter, grid: RadialGrid
) -> float:
    """sum over modes of (2n+1) ||T_k^2||_F^2 (weighted)"""
    total = 0.0
    for mode in modes:
        op = build_mode_operator(media, mode, sp, grid)
        total += mode.weight * hs_norm(op, 2) ** 2
    return total


def schatten_tail_check(
    records: Sequence[EigenRecord],
    k: complex,
    bound_rhs: Optional[float] = None,
    media: Optional[MediaConfig] = None,
    grid: Optional[RadialGrid] = None,
    gamma: float = 1.0,
) -> Tuple[float, float]:
    """
    (partial_sum, bound_rhs); the bound is the Frobenius sum over the modes
    present in records unless given. Contract: partial <= bound (1 + 1e-6).
    """
    partial = schatten_partial_sum(records, k)
    if bound_rhs is None:
        if not records:
            return 0.0, 0.0
        if media is None or grid is None:
            raise ValueError("media and grid are needed to compute the Frobenius bound")
        modes = sorted({r.mode for r in records}, key=ModeId.sort_key)
        sp = SpectralParameter(k=k, gamma=gamma)
        bound_rhs = frobenius_bound(media, modes, sp, grid)
    return partial, float(bound_rhs)


def schatten_tail_sweep(
    records: Sequence[EigenRecord], theta_degrees: float, magnitudes: Sequence[float]
) -> Tuple[List[float], Optional[float]]:
    """Partial sums along a ray of k and their log-log slope vs |k|"""
    sums = [
        schatten_partial_sum(records, cmath.rect(m, math.radians(theta_degrees)))
        for m in magnitudes
    ]
    return sums, safe_slope(magnitudes, sums)


def counting_from_partial(records: Sequence[EigenRecord], k: complex) -> Tuple[int, float]:
    """
    (N(|k|), 16 |k|^4 partial_sum); every |lambda| <= |k| has |i lambda - k| <= 2|k|,
    so the first never exceeds the second.
    """
    t = abs(k)
    count = sum(r.multiplicity for r in records if abs(r.omega) <= t)
    return count, 16.0 * t**4 * schatten_partial_sum(records, k)


# ============= СИМЕТРІЯ =============


def orbit(omega: complex) -> List[complex]:
    return [omega, -omega, omega.conjugate(), -omega.conjugate()]


def missing_partners(
    records: Sequence[EigenRecord], tol: float = 1e-6
) -> List[Tuple[EigenRecord, complex]]:
    """(record, partner) for every orbit point with no record of the same mode and order"""
    groups: Dict[Tuple[ModeId, int], List[EigenRecord]] = defaultdict(list)
    for r in records:
        groups[(r.mode, r.zero_order)].append(r)

    missing = []
    for members in groups.values():
        omegas = np.array([r.omega for r in members])
        for r in members:
            for partner in orbit(r.omega)[1:]:
                if np.abs(omegas - partner).min() > tol * max(1.0, abs(partner)):
                    missing.append((r, partner))
    return missing
