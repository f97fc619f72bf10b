"""
Spectra of mode blocks: frequencies, generalized eigenvectors, expansion
residuals and the cross-checks built on them.

An eigenvalue mu of T_k corresponds to the frequency omega = -i (k + 1/mu),
i.e. mu = 1/(i omega - k).
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import eig, eigvals, null_space, qr, schur, solve_triangular, svd
from scipy.optimize import linear_sum_assignment
from scipy.sparse.csgraph import connected_components

from telab.errors import ChainExtractionIllConditioned, LabError
from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId
from telab.models.spectral import SpectralParameter, validate_k
from telab.services.dispersion import reduced_dispersion
from telab.services.modeop.grid import build_grid
from telab.services.modeop.norms import op_norm, vector_norm, weighted
from telab.services.modeop.operator import (
    ModeOperator,
    build_mode_operator,
    modified_resolvent,
    shifted_operator,
)

CLUSTER_TOL = 1e-8
UNRESOLVED_TOL = 1e-10
CONFIRM_TOL = 1e-6
SMOOTHING_POWER = 6
"""Степінь T у гладких цілях перевірки повноти"""


def mu_to_omega(mu: complex, k: complex) -> complex:
    return -1j * (k + 1.0 / mu)


def omega_to_mu(omega: complex, k: complex) -> complex:
    return 1.0 / (1j * omega - k)


class OperatorSpectrum(BaseModel):
    """
    pairs      - (mu, omega), sorted by |omega| ascending
    static     - eigenvalues at omega = 0 (mu = -1/k), not transmission eigenvalues
    unresolved - |mu| < 1e-10 ||T||
    """

    model_config = ConfigDict(frozen=True)

    k: complex
    pairs: List[Tuple[complex, complex]]
    static: List[complex]
    unresolved: List[complex]

    @property
    def frequencies(self) -> List[complex]:
        return [w for _, w in self.pairs]


def eigs_to_frequencies(op: ModeOperator, eigenvalues: Optional[np.ndarray] = None) -> OperatorSpectrum:
    mus = eigvals(op.matrix) if eigenvalues is None else eigenvalues
    t_norm = op_norm(op)
    pairs, static, unresolved = [], [], []
    static_tol = 1e-7 * max(1.0, abs(op.k))
    for mu in mus:
        mu = complex(mu)
        if abs(mu) < UNRESOLVED_TOL * t_norm:
            unresolved.append(mu)
            continue
        omega = mu_to_omega(mu, op.k)
        if abs(omega) < static_tol:
            static.append(mu)
        else:
            pairs.append((mu, omega))
    pairs.sort(key=lambda p: (abs(p[1]), p[1].real, p[1].imag))
    return OperatorSpectrum(k=op.k, pairs=pairs, static=static, unresolved=unresolved)


def confirmed_frequencies(
    op: ModeOperator, spectrum: OperatorSpectrum, omega_max: float, tol: float = CONFIRM_TOL
) -> List[complex]:
    """Operator frequencies with |omega| <= omega_max whose dispersion residual is <= tol"""
    candidates = [w for w in spectrum.frequencies if abs(w) <= omega_max]
    if not candidates:
        return []
    relative = reduced_dispersion(op.media, op.mode, np.array(candidates))[2]
    return [w for w, q in zip(candidates, relative) if q <= tol]


# ============= УЗАГАЛЬНЕНІ ВЛАСНІ ВЕКТОРИ =============


class EigenBasis(BaseModel):
    """
    Columns of vectors (coordinates, weighted norm 1) ordered by |mu|
    descending; heights[j] is the chain length m with (mu - T)^m v = 0.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vectors: np.ndarray
    eigenvalues: np.ndarray
    heights: np.ndarray
    clusters: List[List[int]]
    diagnostics: List[dict]

    @property
    def size(self) -> int:
        return self.vectors.shape[1]


def _kernel(mat: np.ndarray, threshold: float) -> np.ndarray:
    """Orthonormal basis of the numerical kernel (singular values <= threshold)"""
    _, s, vh = svd(mat)
    rank = int(np.sum(s > threshold))
    return vh[rank:].conj().T


def _cluster_vectors(tw: np.ndarray, center: complex, radius: float, t_norm: float):
    """
    Basis of the invariant subspace at center, tagged by height m: vectors of
    ker N^m orthogonal to ker N^(m-1), N = T11 - center in the sorted Schur form.
    """
    tri, z, sdim = schur(tw, output="complex", sort=lambda x: abs(x - center) <= radius)
    sdim = max(int(sdim), 1)
    nil = tri[:sdim, :sdim] - center * np.eye(sdim)

    basis = np.zeros((sdim, 0), dtype=complex)
    heights: List[int] = []
    power = np.eye(sdim, dtype=complex)
    for m in range(1, sdim + 1):
        power = nil @ power
        kernel = _kernel(power, 1e-6 * max(t_norm, 1.0) ** m)
        if basis.shape[1]:
            kernel = kernel - basis @ (basis.conj().T @ kernel)
        left, s, _ = svd(kernel, full_matrices=False)
        new = left[:, s > 1e-8][:, : sdim - basis.shape[1]]
        basis = np.hstack([basis, new])
        heights.extend([m] * new.shape[1])
        if basis.shape[1] == sdim:
            break

    if basis.shape[1] < sdim:
        rest = null_space(basis.conj().T) if basis.shape[1] else np.eye(sdim)
        rest = rest[:, : sdim - basis.shape[1]]
        basis = np.hstack([basis, rest])
        heights.extend([sdim] * rest.shape[1])

    return z[:, :sdim] @ basis, heights, sdim


def generalized_eigenbasis(op: ModeOperator) -> EigenBasis:
    """
    Isolated eigenvalues come from eig; clusters closer than 1e-8 ||T|| go
    through a sorted Schur form and the kernel filtration of (T11 - mu)^m.
    Clusters are reported as single groups in diagnostics.
    """
    tw = weighted(op)
    t_norm = float(np.linalg.norm(tw, 2))
    tol = CLUSTER_TOL * t_norm
    values, vecs = eig(tw)

    close = np.abs(values[:, None] - values[None, :]) < tol
    ncomp, labels = connected_components(close, directed=False)

    columns: List[np.ndarray] = []
    tags: List[complex] = []
    heights: List[int] = []
    groups: List[List[int]] = []
    diagnostics: List[dict] = []

    for comp in range(ncomp):
        idx = np.flatnonzero(labels == comp)
        if len(idx) == 1:
            v = vecs[:, idx[0]]
            columns.append((v / np.linalg.norm(v))[:, None])
            tags.append(complex(values[idx[0]]))
            heights.append(1)
            continue

        center = complex(values[idx].mean())
        radius = float(np.abs(values[idx] - center).max()) + tol
        block, hs, sdim = _cluster_vectors(tw, center, radius, t_norm)
        block, hs = block[:, : len(idx)], hs[: len(idx)]
        groups.append(list(range(len(tags), len(tags) + block.shape[1])))
        columns.append(block / np.linalg.norm(block, axis=0))
        tags.extend([center] * block.shape[1])
        heights.extend(hs)
        err = ChainExtractionIllConditioned(
            f"{op.mode}: {len(idx)} eigenvalues within {CLUSTER_TOL:g}||T|| of {center:.6g}",
            mode=str(op.mode),
            center=[center.real, center.imag],
            size=len(idx),
            schur_dim=sdim,
            max_height=max(hs),
        )
        diagnostics.append(err.to_dict())
        logger.warning(f"⚠️  {err.message}")

    # weighted norm of R_w^-1 c equals ||c||_2 = 1
    vectors = solve_triangular(op.structure.weight, np.hstack(columns), lower=False)

    tags_arr = np.array(tags)
    order = np.lexsort((np.arange(len(tags_arr)), -np.abs(tags_arr)))
    position = np.empty_like(order)
    position[order] = np.arange(len(order))

    return EigenBasis(
        vectors=vectors[:, order],
        eigenvalues=tags_arr[order],
        heights=np.array(heights)[order],
        clusters=[sorted(int(position[j]) for j in g) for g in groups],
        diagnostics=diagnostics,
    )


def chain_defect(op: ModeOperator, basis: EigenBasis, j: int) -> float:
    """||(mu - T)^m v|| / (||v|| ||T||^m) in the weighted norm"""
    v = basis.vectors[:, j]
    mu = basis.eigenvalues[j]
    m = int(basis.heights[j])
    w = v.copy()
    for _ in range(m):
        w = mu * w - op.matrix @ w
    return vector_norm(op, w) / (vector_norm(op, v) * op_norm(op) ** m)


# ============= ПОВНОТА =============


class ExpansionTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    m_values: List[int]
    residuals: List[float]
    target_norm: float

    def first_below(self, threshold: float) -> Optional[int]:
        """Smallest tabulated m with residual <= threshold * ||target||"""
        for m, r in zip(self.m_values, self.residuals):
            if r <= threshold * self.target_norm:
                return m
        return None


def expansion_residual(
    op: ModeOperator,
    target: np.ndarray,
    m_list: Sequence[int],
    basis: Optional[EigenBasis] = None,
) -> ExpansionTable:
    """
    Weighted L2 distance from target to the span of the first m basis
    vectors. One QR of the weighted basis; residuals are tail norms of
    Q^H target, so they are nonincreasing and 0 at m = N'.
    """
    basis = basis or generalized_eigenbasis(op)
    w = op.structure.weight
    q, _ = qr(w @ basis.vectors)
    coeff = q.conj().T @ (w @ target)
    tail2 = np.concatenate([np.cumsum((np.abs(coeff) ** 2)[::-1])[::-1], [0.0]])
    residuals = [float(np.sqrt(tail2[min(max(m, 0), basis.size)])) for m in m_list]
    return ExpansionTable(
        m_values=[int(m) for m in m_list],
        residuals=residuals,
        target_norm=vector_norm(op, target),
    )


def polynomial_source(op: ModeOperator, rng: np.random.Generator, degree: int = 3) -> np.ndarray:
    """Coordinates of a random smooth source: r^(n+1) times a random polynomial per component"""
    r = op.grid.points / op.grid.radius
    parts = []
    for _ in range(4):
        c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        parts.append(r ** (op.mode.degree + 1) * np.polyval(c, r))
    return np.concatenate(parts)[op.structure.keep]


def smooth_target(op: ModeOperator, rng: np.random.Generator) -> np.ndarray:
    """
    T^SMOOTHING_POWER applied to a random smooth source, weighted norm 1.

    Coefficients along the eigenbasis then decay like mu^SMOOTHING_POWER,
    so a truncated expansion reaches 1e-3 well before half the basis.
    """
    y = polynomial_source(op, rng)
    for _ in range(SMOOTHING_POWER):
        y = op.matrix @ y
    return y / vector_norm(op, y)


# ============= ПЕРЕХРЕСНІ ПЕРЕВІРКИ =============


def square_spectrum_check(op: ModeOperator) -> float:
    """
    Nonzero eigenvalues of T^2 are the squares of those of T (with
    multiplicity). Returns the largest matching deviation / ||T||^2.
    """
    squares = eigvals(op.matrix) ** 2
    direct = eigvals(op.matrix @ op.matrix)
    cost = np.abs(squares[:, None] - direct[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) / op_norm(op) ** 2


def match_frequencies(
    a: Sequence[complex], b: Sequence[complex], tol: float
) -> Tuple[List[Tuple[complex, complex]], List[complex], List[complex]]:
    """
    Greedy nearest matching within tol * max(1, |omega|), smallest |omega| first.
    Returns (pairs, unmatched in a, unmatched in b).
    """
    rest_b = list(b)
    pairs, rest_a = [], []
    for w in sorted(a, key=lambda x: (abs(x), x.real, x.imag)):
        dist = [abs(w - v) for v in rest_b]
        j = int(np.argmin(dist)) if dist else -1
        if j >= 0 and dist[j] <= tol * max(1.0, abs(w)):
            pairs.append((w, rest_b.pop(j)))
        else:
            rest_a.append(w)
    return pairs, rest_a, rest_b


def grid_refinement_check(
    media: MediaConfig,
    mode: ModeId,
    sp: SpectralParameter,
    size: int,
    omega_max: Optional[float] = None,
    seed: int = 0,
) -> Dict[str, float]:
    """
    Compare the block on N and 3N/2 nodes:
        eigen_deviation  - max |omega_N - omega_3N/2| over confirmed |omega| <= omega_max
        eigen_unmatched  - confirmed coarse frequencies without a fine partner
        action_deviation - T applied to smooth sources, fine result interpolated
                           to the coarse nodes, max relative difference
    """
    radius = media.radius
    omega_max = 10.0 / radius if omega_max is None else omega_max
    coarse = build_mode_operator(media, mode, sp, build_grid(radius, size))
    fine = build_mode_operator(media, mode, sp, build_grid(radius, (3 * size) // 2))

    wc = confirmed_frequencies(coarse, eigs_to_frequencies(coarse), omega_max)
    wf = [w for w in eigs_to_frequencies(fine).frequencies if abs(w) <= 1.2 * omega_max]
    pairs, unmatched, _ = match_frequencies(wc, wf, 1e-4)
    eigen_dev = max((abs(a - b) / max(1.0, abs(a)) for a, b in pairs), default=0.0)

    rng = np.random.default_rng(seed)
    action_dev = 0.0
    for _ in range(3):
        coeffs = [rng.standard_normal(4) for _ in range(4)]

        def source(op: ModeOperator) -> np.ndarray:
            r = op.grid.points / radius
            full = np.concatenate([r ** (mode.degree + 1) * np.polyval(c, r) for c in coeffs])
            return full[op.structure.keep]

        xc = coarse.lifted(coarse.apply(source(coarse)))
        xf = fine.lifted(fine.apply(source(fine)))
        nc, nf = coarse.grid.size, fine.grid.size
        for part in range(4):
            vc = xc[part * nc : (part + 1) * nc]
            vf = xf[part * nf : (part + 1) * nf]
            on_coarse = fine.grid.interpolate(vf, coarse.grid.points)
            scale = max(float(np.abs(vc).max()), 1e-300)
            action_dev = max(action_dev, float(np.abs(on_coarse - vc).max()) / scale)

    logger.debug(
        f"{mode}: grid {size}->{fine.grid.size}: eigen {eigen_dev:.2e} "
        f"({len(unmatched)} unmatched), action {action_dev:.2e}"
    )
    return {
        "eigen_deviation": eigen_dev,
        "eigen_unmatched": float(len(unmatched)),
        "eigen_compared": float(len(pairs)),
        "action_deviation": action_dev,
    }


def algebraic_multiplicities(values: Sequence[complex], targets: Sequence[complex], tol: float) -> List[int]:
    """Number of eigenvalues within tol * max(1, |w|) of each target"""
    values = np.asarray(values)
    return [int(np.sum(np.abs(values - w) <= tol * max(1.0, abs(w)))) for w in targets]


class KIndependenceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    k1: complex
    k2: complex
    matched: int
    max_deviation: float
    only_k1: List[complex]
    only_k2: List[complex]
    multiplicity_mismatches: List[Tuple[complex, int, int]]

    @property
    def consistent(self) -> bool:
        return not (self.only_k1 or self.only_k2 or self.multiplicity_mismatches)


def k_independence_check(
    media: MediaConfig,
    mode: ModeId,
    sp1: SpectralParameter,
    sp2: SpectralParameter,
    size: int,
    omega_max: Optional[float] = None,
    tol: float = 1e-6,
) -> KIndependenceReport:
    """
    Confirmed frequencies and their multiplicities at two k values.
    Discrepancies are reported as found.
    """
    omega_max = 10.0 / media.radius if omega_max is None else omega_max
    grid = build_grid(media.radius, size)
    op1 = build_mode_operator(media, mode, sp1, grid)
    op2 = build_mode_operator(media, mode, sp2, grid)
    s1, s2 = eigs_to_frequencies(op1), eigs_to_frequencies(op2)
    w1 = confirmed_frequencies(op1, s1, omega_max)
    w2 = confirmed_frequencies(op2, s2, omega_max)
    pairs, only1, only2 = match_frequencies(w1, w2, tol)

    mismatches = []
    for a, b in pairs:
        m1 = algebraic_multiplicities(s1.frequencies, [a], tol)[0]
        m2 = algebraic_multiplicities(s2.frequencies, [b], tol)[0]
        if m1 != m2:
            mismatches.append((a, m1, m2))

    report = KIndependenceReport(
        k1=sp1.k,
        k2=sp2.k,
        matched=len(pairs),
        max_deviation=max((abs(a - b) for a, b in pairs), default=0.0),
        only_k1=only1,
        only_k2=only2,
        multiplicity_mismatches=mismatches,
    )
    if not report.consistent:
        logger.warning(f"⚠️  {mode}: спектри при k1={sp1.k:.4g} та k2={sp2.k:.4g} розходяться")
    return report


# ============= ТОТОЖНІСТЬ РЕЗОЛЬВЕНТИ =============


def random_admissible_shifts(
    op: ModeOperator,
    rng: np.random.Generator,
    count: int = 5,
    gamma: float = 1.0,
    k_min: float = 0.0,
    max_draws: int = 1000,
) -> List[complex]:
    """
    Seeded shifts s with k + s in the sector and |s| <= |k|/2. A draw that
    leaves the sector is projected onto the ray through k (the only
    admissible direction when gamma = 1); draws still failing validate_k
    are skipped.
    """
    shifts: List[complex] = []
    scale = 0.5 * abs(op.k)
    along = op.k / abs(op.k)
    for _ in range(max_draws):
        if len(shifts) == count:
            break
        size = scale * rng.random()
        angle = 2.0 * np.pi * rng.random()
        for s in (complex(size * np.exp(1j * angle)), complex(np.sign(np.cos(angle)) * size * along)):
            try:
                validate_k(op.k + s, gamma, k_min)
            except LabError:
                continue
            shifts.append(s)
            break
    if len(shifts) < count:
        raise ValueError(f"only {len(shifts)} admissible shifts in {max_draws} draws")
    return shifts


def resolvent_identity_deviation(op: ModeOperator, s: complex) -> Dict[str, float]:
    """
    relative - ||T(I - sT)^-1 - T_{k+s}|| / ||T_{k+s}|| (weighted)
    sides    - ||T(I - sT)^-1 - (I - sT)^-1 T|| / ||T||
    """
    right = modified_resolvent(op, s, side="right")
    left = modified_resolvent(op, s, side="left")
    direct = shifted_operator(op, s)
    return {
        "relative": op_norm(op, right - direct.matrix) / op_norm(op, direct.matrix),
        "sides": op_norm(op, right - left) / op_norm(op),
    }
