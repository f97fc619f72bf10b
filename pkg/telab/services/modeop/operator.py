"""
Per-mode block of the solution operator T_k.

TE-form reduction (TM uses the dual media, eps <-> mu on both sides):

    E = (u/r) Phi,   H = curl((q/r) Phi),   Phi = r x grad Y
    L(u, q) = ((q'' - nu^2 q / r^2) / eps,  u / mu)
    (L - k)(u, q) = (u_J, q_J)                         on each side
    mu q(R) = mu_hat q_hat(R),   q'(R) = q_hat'(R)     at r = R

Nodal vector x = [u, q, u_hat, q_hat] (4N values). The algebraic q-rows at
r = R are replaced by the two matching conditions, which slaves q(R) and
q_hat(R); the remaining 4N - 2 values are the coordinates. Equation rows
and coordinates share the same index set, so

    M(k) = A - k diag(mask),   T_k = S M(k)^-1 E,   B = E S = diag(mask)

and T_k (I - s T_k)^-1 = T_{k+s} holds exactly for the discrete blocks.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import get_lapack_funcs

from telab.config import settings
from telab.errors import IllConditionedSolve, ModifiedResolventSingular
from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId
from telab.models.spectral import SpectralParameter
from telab.services.dispersion import te_media
from telab.services.modeop.grid import RadialGrid, build_grid


class ModeStructure(BaseModel):
    """k-independent part of a mode block: pencil, lifting and norm samplers"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    size: int
    pencil: np.ndarray
    """A, 4N x 4N"""
    mask: np.ndarray
    """1 on coordinate rows/columns, 0 on the two slaved ones"""
    keep: np.ndarray
    lift: np.ndarray
    """Z, 4N x (4N-2): coordinates -> full nodal vector"""
    l2_sampler: np.ndarray
    h1_sampler: np.ndarray
    h2_sampler: np.ndarray
    weight: np.ndarray
    """R_w, upper triangular: ||y||_w = ||R_w y||_2"""


class ModeOperator(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    k: complex
    mode: ModeId
    media: MediaConfig
    grid: RadialGrid
    structure: ModeStructure
    condition: float

    @property
    def size(self) -> int:
        """N' = 4N - 2"""
        return self.matrix.shape[0]

    def system(self, k: complex | None = None) -> np.ndarray:
        k = self.k if k is None else k
        return self.structure.pencil - k * np.diag(self.structure.mask)

    def lifted(self, coords: np.ndarray) -> np.ndarray:
        return self.structure.lift @ coords

    def apply(self, source: np.ndarray) -> np.ndarray:
        return self.matrix @ source


# ============= ЗБІРКА =============


def _side_rows(n: int, grid: RadialGrid, nu2: float, eps: float, mu: float):
    """ODE block (acting on q) and algebraic block (acting on u) of one side"""
    r = grid.points
    ode = (grid.d2 - np.diag(nu2 / r**2)) / eps
    alg = np.eye(n) / mu
    return ode, alg


def _samplers(grid: RadialGrid, nu2: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Physical samples of one side from its nodal (u, q), each 3N rows (L2),
    plus the H1 and H2 surrogate rows. Angular factors: |Y|^2 = 1,
    |Psi|^2 = |Phi|^2 = nu^2.

    The surrogates add the radial derivative seminorms (first, then also
    second) of the r-scaled unknowns u, q, q' in the plain dr measure on
    top of the L2 rows, so each dominates the L2 norm.
    """
    n = grid.size
    r = grid.points
    nu = np.sqrt(nu2)
    sw = np.sqrt(grid.weights)
    plain = sw / r
    zero = np.zeros((n, n))
    eye = np.eye(n)
    inv_r = np.diag(1.0 / r)

    # base functions: e = u/r, h_r = q/r^2, h_t = q'/r, as maps from (u, q)
    base = [
        (nu, np.hstack([inv_r, zero])),
        (nu2, np.hstack([zero, inv_r @ inv_r])),
        (nu, np.hstack([zero, inv_r @ grid.d1])),
    ]
    # the same three without their 1/r powers: u, q, q'
    scaled = [
        np.hstack([eye, zero]),
        np.hstack([zero, eye]),
        np.hstack([zero, grid.d1]),
    ]

    l2, h1, h2 = [], [], []
    for (factor, f), g in zip(base, scaled):
        s = np.diag(sw) * factor
        p = np.diag(plain) * factor
        dg = p @ (grid.d1 @ g)
        l2.append(s @ f)
        h1.extend([s @ f, dg])
        h2.extend([s @ f, dg, p @ (grid.d2 @ g)])
    return np.vstack(l2), np.vstack(h1), np.vstack(h2)


def _two_sided(block: np.ndarray) -> np.ndarray:
    """Same per-side sampler on [u, q, u_hat, q_hat]"""
    rows, cols = block.shape
    out = np.zeros((2 * rows, 2 * cols))
    out[:rows, :cols] = block
    out[rows:, cols:] = block
    return out


@lru_cache(maxsize=64)
def mode_structure(media: MediaConfig, mode: ModeId, radius: float, size: int) -> ModeStructure:
    grid = build_grid(radius, size)
    m = te_media(media, mode)
    n = size
    nu2 = float(mode.nu2)

    a = np.zeros((4 * n, 4 * n))
    ode1, alg1 = _side_rows(n, grid, nu2, m.eps, m.mu)
    ode2, alg2 = _side_rows(n, grid, nu2, m.eps_hat, m.mu_hat)
    a[0:n, n : 2 * n] = ode1
    a[n : 2 * n, 0:n] = alg1
    a[2 * n : 3 * n, 3 * n : 4 * n] = ode2
    a[3 * n : 4 * n, 2 * n : 3 * n] = alg2

    q_end, qh_end = 2 * n - 1, 4 * n - 1
    # matching rows replace the algebraic rows at r = R
    a[q_end, :] = 0.0
    a[q_end, q_end] = m.mu
    a[q_end, qh_end] = -m.mu_hat
    a[qh_end, :] = 0.0
    a[qh_end, n : 2 * n] = grid.d1[-1]
    a[qh_end, 3 * n : 4 * n] = -grid.d1[-1]

    mask = np.ones(4 * n)
    mask[[q_end, qh_end]] = 0.0
    keep = np.flatnonzero(mask)

    # Z: slaved q(R), q_hat(R) from the matching rows
    lift = np.zeros((4 * n, len(keep)))
    lift[keep, np.arange(len(keep))] = 1.0
    d_end = grid.d1[-1, -1]
    denom = d_end * (m.mu_hat - m.mu)
    col = {idx: j for j, idx in enumerate(keep)}
    for i in range(n - 1):
        c = grid.d1[-1, i]
        # s = sum_{i<N-1} d1[R,i] (q_i - q_hat_i)
        for idx, sign in ((n + i, 1.0), (3 * n + i, -1.0)):
            lift[q_end, col[idx]] = -sign * c * m.mu_hat / denom
            lift[qh_end, col[idx]] = -sign * c * m.mu / denom

    l2, h1, h2 = (_two_sided(s) for s in _samplers(grid, nu2))
    l2, h1, h2 = l2 @ lift, h1 @ lift, h2 @ lift
    weight = np.linalg.qr(l2, mode="r")

    arrays = dict(pencil=a, mask=mask, keep=keep, lift=lift)
    arrays.update(l2_sampler=l2, h1_sampler=h1, h2_sampler=h2, weight=weight)
    for v in arrays.values():
        v.setflags(write=False)
    logger.debug(f"{mode}: structure built on N={size} ({len(keep)} coordinates)")
    return ModeStructure(size=size, **arrays)


def _rcond(lu: np.ndarray, anorm: float) -> float:
    (gecon,) = get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    return float(rcond) if info == 0 else 0.0


def assemble(
    media: MediaConfig, mode: ModeId, k: complex, grid: RadialGrid
) -> Tuple[np.ndarray, float, ModeStructure]:
    """T_k at any k (no sector check); returns (matrix, condition, structure)"""
    st = mode_structure(media, mode, grid.radius, grid.size)
    system = st.pencil - k * np.diag(st.mask)
    row = 1.0 / np.abs(system).max(axis=1)
    scaled = system * row[:, None]
    anorm = float(np.abs(scaled).sum(axis=0).max())
    lu = lu_factor(scaled.astype(complex), check_finite=False)
    rcond = _rcond(lu[0], anorm)
    condition = np.inf if rcond == 0.0 else 1.0 / rcond
    if condition > settings.COND_LIMIT:
        raise IllConditionedSolve(
            f"{mode}: condition estimate {condition:.3e} > {settings.COND_LIMIT:.0e} at k={k}",
            mode=str(mode),
            k=[k.real, k.imag],
            condition=condition,
            grid_size=grid.size,
        )
    rhs = np.diag(row)[:, st.keep].astype(complex)
    solution = lu_solve(lu, rhs, check_finite=False)
    return solution[st.keep, :], condition, st


def build_mode_operator(
    media: MediaConfig, mode: ModeId, sp: SpectralParameter, grid: RadialGrid
) -> ModeOperator:
    """
    Raises:
        IllConditionedSolve: оцінка обумовленості > COND_LIMIT
    """
    k = complex(sp.k)
    matrix, condition, st = assemble(media, mode, k, grid)
    matrix.setflags(write=False)
    logger.debug(f"{mode}: T_k built, k={k:.4g}, N'={matrix.shape[0]}, cond={condition:.2e}")
    return ModeOperator(
        matrix=matrix,
        k=k,
        mode=mode,
        media=media,
        grid=grid,
        structure=st,
        condition=condition,
    )


def shifted_operator(op: ModeOperator, s: complex) -> ModeOperator:
    """T at k + s on the same grid, without the sector check"""
    k = op.k + complex(s)
    matrix, condition, st = assemble(op.media, op.mode, k, op.grid)
    return op.model_copy(update={"matrix": matrix, "k": k, "condition": condition})


# ============= ПЕРЕВІРКИ =============


def collocation_residual(op: ModeOperator, source: np.ndarray) -> float:
    """
    Normwise backward error of the collocated system for x = Z T source:
    ||M x - E source||_inf / (||M||_inf ||x||_inf + ||source||_inf)
    """
    st = op.structure
    x = st.lift @ (op.matrix @ source)
    system = op.system()
    rhs = np.zeros(system.shape[0], dtype=complex)
    rhs[st.keep] = source
    row = 1.0 / np.abs(system).max(axis=1)
    res = row * (system @ x - rhs)
    denom = float(np.abs(x).max()) + float(np.abs(row * rhs).max())
    return float(np.abs(res).max()) / denom if denom > 0 else 0.0


def matching_defect(op: ModeOperator, source: np.ndarray) -> float:
    """Largest violation of the two matching rows by Z T source"""
    st = op.structure
    x = st.lift @ (op.matrix @ source)
    n = op.grid.size
    rows = st.pencil[[2 * n - 1, 4 * n - 1]]
    return float(np.abs(rows @ x).max())


def modified_resolvent(op: ModeOperator, s: complex, side: str = "left") -> np.ndarray:
    """
    (I - sT)^-1 T (side="left") or T (I - sT)^-1 (side="right")

    Raises:
        ModifiedResolventSingular: оцінка обумовленості I - sT > COND_LIMIT
    """
    s = complex(s)
    t = op.matrix
    if s == 0:
        return t.copy()
    shifted = np.eye(t.shape[0]) - s * t
    lu = lu_factor(shifted, check_finite=False)
    anorm = float(np.abs(shifted).sum(axis=0).max())
    rcond = _rcond(lu[0], anorm)
    if rcond == 0.0 or 1.0 / rcond > settings.COND_LIMIT:
        raise ModifiedResolventSingular(
            f"I - sT is singular to working precision at s={s} (1/s near an eigenvalue of T)",
            s=[s.real, s.imag],
            mode=str(op.mode),
            rcond=rcond,
        )
    if side == "left":
        return lu_solve(lu, t, check_finite=False)
    return lu_solve(lu, t.T, trans=1, check_finite=False).T
