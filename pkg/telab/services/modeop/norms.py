"""
Weighted norms of mode blocks and their |k|-scalings.

A coordinate vector y has weighted L2 norm ||R_w y||_2, where R_w is the QR
factor of the physical sampler (quadrature weights and angular factors
folded in). Operator norms are plain 2-norms after the similarity
R_w T R_w^-1; the H1/H2 surrogates apply the radial derivative samplers
to the output T f (first derivatives for H1, up to second for H2).
"""
from __future__ import annotations

import cmath
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.linalg import norm as matrix_norm
from scipy.linalg import solve_triangular, svdvals

from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId
from telab.models.spectral import validate_k
from telab.services.modeop.grid import RadialGrid
from telab.services.modeop.operator import ModeOperator, build_mode_operator, modified_resolvent
from telab.utils.helpers import loglog_slope

SCALING_HEADER = ["abs_k", "op_norm_L2", "hs_norm_T2", "h1_norm_T", "h2_norm_T2"]
PROBE_HEADER = ["r", "product"]


# ============= ЗВАЖЕНІ НОРМИ =============


def right_inverse(op: ModeOperator, mat: np.ndarray) -> np.ndarray:
    """mat R_w^-1"""
    w = op.structure.weight
    return solve_triangular(w, mat.T, trans="T", lower=False).T


def weighted(op: ModeOperator, mat: Optional[np.ndarray] = None) -> np.ndarray:
    """R_w mat R_w^-1 (mat = T by default)"""
    mat = op.matrix if mat is None else mat
    return right_inverse(op, op.structure.weight @ mat)


def vector_norm(op: ModeOperator, y: np.ndarray) -> float:
    return float(np.linalg.norm(op.structure.weight @ y))


def op_norm(op: ModeOperator, mat: Optional[np.ndarray] = None) -> float:
    """Weighted L2 -> L2 operator norm"""
    return float(matrix_norm(weighted(op, mat), 2))


def hs_norm(op: ModeOperator, power: int = 2) -> float:
    """Weighted Frobenius norm of T^power"""
    return float(matrix_norm(weighted(op, np.linalg.matrix_power(op.matrix, power)), "fro"))


def h1_norm(op: ModeOperator) -> float:
    """L2 -> H1 (discrete surrogate) norm of T"""
    return float(matrix_norm(right_inverse(op, op.structure.h1_sampler @ op.matrix), 2))


def h2_norm(op: ModeOperator, power: int = 2) -> float:
    """L2 -> H2 (discrete surrogate) norm of T^power"""
    t = np.linalg.matrix_power(op.matrix, power)
    return float(matrix_norm(right_inverse(op, op.structure.h2_sampler @ t), 2))


def smallest_singular(op: ModeOperator) -> float:
    """Smallest weighted singular value of T (discrete injectivity)"""
    return float(svdvals(weighted(op)).min())


class SchattenCheck(BaseModel):
    """sum |mu_j|^4 against ||T^2||_F^2 (weighted)"""

    schatten4: float
    frobenius2: float

    @property
    def holds(self) -> bool:
        return self.schatten4 <= self.frobenius2 * (1.0 + 1e-8)


def schatten_four_check(op: ModeOperator, eigenvalues: Optional[np.ndarray] = None) -> SchattenCheck:
    if eigenvalues is None:
        eigenvalues = np.linalg.eigvals(op.matrix)
    return SchattenCheck(
        schatten4=float(np.sum(np.abs(eigenvalues) ** 4)),
        frobenius2=hs_norm(op, 2) ** 2,
    )


# ============= МАСШТАБУВАННЯ ПО |k| =============


class NormScalingReport(BaseModel):
    """
    Per-k norms along a ray and their log-log slopes vs |k|, in the order
    (op_norm_L2, hs_norm_T2, h1_norm_T, h2_norm_T2).

    combined_bounds holds, per k, |k| ||T|| + ||T||_{L2->H1} and
    |k|^2 ||T^2|| + |k| ||T^2||_{L2->H1} + ||T^2||_{L2->H2}.
    """

    model_config = ConfigDict(frozen=True)

    mode: ModeId
    k_values: List[complex]
    op_norm_L2: List[float]
    hs_norm_T2: List[float]
    h1_norm_T: List[float]
    h2_norm_T2: List[float]
    fitted_slopes: List[float]
    combined_bounds: List[List[float]]

    @model_validator(mode="after")
    def _lengths(self) -> "NormScalingReport":
        n = len(self.k_values)
        for name in ("op_norm_L2", "hs_norm_T2", "h1_norm_T", "h2_norm_T2", "combined_bounds"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has {len(getattr(self, name))} entries, expected {n}")
        if len(self.fitted_slopes) != 4 or not all(math.isfinite(s) for s in self.fitted_slopes):
            raise ValueError("fitted_slopes must be four finite numbers")
        return self

    @property
    def abs_k(self) -> List[float]:
        return [abs(k) for k in self.k_values]

    def rows(self) -> List[list]:
        return [
            [abs(k), a, b, c, d]
            for k, a, b, c, d in zip(
                self.k_values, self.op_norm_L2, self.hs_norm_T2, self.h1_norm_T, self.h2_norm_T2
            )
        ]

    @staticmethod
    def spread(values: Sequence[float]) -> float:
        """max/min"""
        return max(values) / min(values)


def norm_scaling_report(
    media: MediaConfig,
    mode: ModeId,
    theta_degrees: float,
    magnitudes: Sequence[float],
    grid: RadialGrid,
    gamma: float = 1.0,
    k_min: float = 0.0,
) -> NormScalingReport:
    """
    Raises:
        SectorViolation, MagnitudeTooSmall: точка променя поза сектором
        IllConditionedSolve: з build_mode_operator
    """
    ks, op_l2, hs2, h1, h2, combined = [], [], [], [], [], []
    for magnitude in magnitudes:
        sp = validate_k(cmath.rect(magnitude, math.radians(theta_degrees)), gamma, k_min)
        op = build_mode_operator(media, mode, sp, grid)
        t2 = op.matrix @ op.matrix
        a = op_norm(op)
        b = float(matrix_norm(weighted(op, t2), "fro"))
        c = h1_norm(op)
        d = float(matrix_norm(right_inverse(op, op.structure.h2_sampler @ t2), 2))
        t2_l2 = op_norm(op, t2)
        t2_h1 = float(matrix_norm(right_inverse(op, op.structure.h1_sampler @ t2), 2))
        ks.append(sp.k)
        op_l2.append(a)
        hs2.append(b)
        h1.append(c)
        h2.append(d)
        combined.append([magnitude * a + c, magnitude**2 * t2_l2 + magnitude * t2_h1 + d])
        logger.debug(f"{mode} |k|={magnitude}: ||T||={a:.3e} ||T^2||_F={b:.3e}")

    abs_k = [abs(k) for k in ks]
    slopes = [loglog_slope(abs_k, series)[0] for series in (op_l2, hs2, h1, h2)]
    logger.info(
        f"📉 {mode}: нахили ||T||={slopes[0]:.3f}, ||T^2||_F={slopes[1]:.3f}, "
        f"H1={slopes[2]:.3f}, H2={slopes[3]:.3f}"
    )
    return NormScalingReport(
        mode=mode,
        k_values=ks,
        op_norm_L2=op_l2,
        hs_norm_T2=hs2,
        h1_norm_T=h1,
        h2_norm_T2=h2,
        fitted_slopes=slopes,
        combined_bounds=combined,
    )


# ============= НАПРЯМОК МІНІМАЛЬНОГО РОСТУ =============


class MinimalGrowthTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta: float
    power: int
    r_values: List[float]
    products: List[float]
    bound: float
    """max product over r_values"""

    @property
    def ratio(self) -> float:
        return max(self.products) / min(self.products)

    def rows(self) -> List[list]:
        return [[r, p] for r, p in zip(self.r_values, self.products)]


def minimal_growth_probe(
    op: ModeOperator, theta: float, r_list: Sequence[float], power: int = 1
) -> MinimalGrowthTable:
    """
    r ||A (I - r e^{i theta} A)^-1|| for A = T^power (weighted norm).

    theta is in radians.

    Raises:
        ModifiedResolventSingular: r e^{i theta} is 1/eigenvalue of A
        ValueError: Im(e^{2 i theta}) = 0
    """
    if power not in (1, 2):
        raise ValueError(f"power must be 1 or 2, got {power}")
    if abs(math.sin(2.0 * theta)) < 1e-12:
        raise ValueError("direction must satisfy |Im(e^{2i theta})| > 0")

    base = op
    if power == 2:
        base = op.model_copy(update={"matrix": op.matrix @ op.matrix})

    direction = cmath.exp(1j * theta)
    products = []
    for r in r_list:
        res = modified_resolvent(base, r * direction)
        products.append(float(r) * op_norm(op, res))
    return MinimalGrowthTable(
        theta=theta,
        power=power,
        r_values=[float(r) for r in r_list],
        products=products,
        bound=max(products),
    )
