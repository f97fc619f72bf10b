"""
Radial Chebyshev-Gauss-Lobatto grid on [0, R] with the origin node eliminated
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.interpolate import BarycentricInterpolator


class RadialGrid(BaseModel):
    """
    points  - N ascending nodes in (0, R], points[-1] = R
    weights - quadrature weights for f(r) r^2 dr (the r^2 Jacobian included)
    d1, d2  - derivative matrices for unknowns that vanish at r = 0
    d1_full - derivative matrix on all N+1 nodes (origin included)
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    radius: float
    size: int
    points: np.ndarray
    weights: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    nodes_full: np.ndarray
    d1_full: np.ndarray

    def volume_defect(self) -> float:
        """|sum(weights) - R^3/3| / (R^3/3)"""
        exact = self.radius**3 / 3.0
        return abs(float(self.weights.sum()) - exact) / exact

    def constant_defect(self) -> float:
        """max |d1_full . 1|"""
        return float(np.abs(self.d1_full.sum(axis=1)).max())

    def interpolate(self, values: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """Polynomial interpolant through (0, 0) and the nodal values"""
        full = np.concatenate([[0.0], np.asarray(values)])
        return BarycentricInterpolator(self.nodes_full, full)(np.asarray(targets))


def _chebyshev_nodes(n: int, radius: float) -> np.ndarray:
    j = np.arange(n + 1)
    return radius * (1.0 - np.cos(np.pi * j / n)) / 2.0


def _differentiation_matrix(x: np.ndarray) -> np.ndarray:
    """Barycentric first-derivative matrix, diagonal from the negative-sum trick"""
    n = len(x) - 1
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def _clenshaw_curtis(n: int) -> np.ndarray:
    """Clenshaw-Curtis weights on [-1, 1] for x_j = cos(pi j / n)"""
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    inner = np.arange(1, n)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(n * theta[inner]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2.0 * v / n
    return w


@lru_cache(maxsize=32)
def build_grid(radius: float, size: int) -> RadialGrid:
    """
    N nodes in (0, R]; the origin row and column are dropped because every
    radial unknown is r-scaled and vanishes there.
    """
    if size < 8:
        raise ValueError(f"grid size must be >= 8, got {size}")
    if radius <= 0:
        raise ValueError(f"radius must be > 0, got {radius}")

    nodes = _chebyshev_nodes(size, radius)
    d1_full = _differentiation_matrix(nodes)
    d2_full = d1_full @ d1_full
    np.fill_diagonal(d2_full, 0.0)
    np.fill_diagonal(d2_full, -d2_full.sum(axis=1))

    # nodes are an affine image of cos(pi j/N), weights are symmetric in j
    weights = 0.5 * radius * _clenshaw_curtis(size) * nodes**2

    arrays = {
        "points": nodes[1:],
        "weights": weights[1:],
        "d1": d1_full[1:, 1:],
        "d2": d2_full[1:, 1:],
        "nodes_full": nodes,
        "d1_full": d1_full,
    }
    for a in arrays.values():
        a.setflags(write=False)
    return RadialGrid(radius=radius, size=size, **arrays)
