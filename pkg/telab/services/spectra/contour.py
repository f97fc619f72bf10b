"""
Argument-principle zero counts of the dispersion functions.

The winding number is the sum of phase increments of G along the rectangle
boundary (counter-clockwise). Each edge is sampled adaptively until every
consecutive phase step is below pi/2. Counting works on the reduced function
G = D / (C omega^(2n+1)), so the result is the number of zeros of D inside
the rectangle other than omega = 0, with order.
"""
from __future__ import annotations

import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from telab.config import settings
from telab.errors import ContourThroughZero
from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId
from telab.models.spectral import Rectangle, SearchRegion
from telab.services.dispersion import dispersion_array, reduced_dispersion

HALF_PI = 0.5 * math.pi
MAX_REFINEMENTS = 24

Edge = Tuple[complex, complex]


def origin_order(mode: ModeId) -> int:
    """Order of the zero of D at omega = 0: 2n + 1"""
    return 2 * mode.degree + 1


def corners(rect: Rectangle) -> List[complex]:
    """Counter-clockwise from the lower-left corner"""
    return [
        complex(rect.re_min, rect.im_min),
        complex(rect.re_max, rect.im_min),
        complex(rect.re_max, rect.im_max),
        complex(rect.re_min, rect.im_max),
    ]


def boundary_edges(rect: Rectangle) -> List[Edge]:
    c = corners(rect)
    return [(c[i], c[(i + 1) % 4]) for i in range(4)]


class EdgeCache:
    """
    Phase increments of one mode's G along already sampled edges.

    An edge and its reverse share one entry; siblings of a split reuse the
    common cut lines.
    """

    def __init__(self) -> None:
        self._store: Dict[Edge, float] = {}
        self.hits = 0

    @staticmethod
    def _key(edge: Edge) -> Tuple[Edge, float]:
        a, b = edge
        if (a.real, a.imag) <= (b.real, b.imag):
            return (a, b), 1.0
        return (b, a), -1.0

    def get(self, edge: Edge) -> Optional[float]:
        key, sign = self._key(edge)
        value = self._store.get(key)
        if value is None:
            return None
        self.hits += 1
        return sign * value

    def put(self, edge: Edge, phase: float) -> None:
        key, sign = self._key(edge)
        self._store[key] = sign * phase

    def __len__(self) -> int:
        return len(self._store)


def _sampler(media: MediaConfig, mode: ModeId, raw: bool):
    if raw:
        return lambda w: dispersion_array(media, mode, w)
    return lambda w: reduced_dispersion(media, mode, w)


def edge_phase(
    media: MediaConfig,
    mode: ModeId,
    edge: Edge,
    samples: int = 64,
    floor: Optional[float] = None,
    raw: bool = False,
) -> float:
    """
    Continuous phase change of G (or D with raw=True) from edge[0] to edge[1].

    Raises:
        ContourThroughZero: |D|/scale < floor at a sample, or the phase
            steps stay >= pi/2 after MAX_REFINEMENTS rounds
    """
    floor = settings.CONTOUR_FLOOR if floor is None else floor
    a, b = edge
    evaluate = _sampler(media, mode, raw)

    def sample(t: np.ndarray) -> np.ndarray:
        w = a + (b - a) * t
        g, _, relative = evaluate(w)[:3]
        low = np.flatnonzero(relative < floor)
        if low.size:
            z = complex(w[low[0]])
            raise ContourThroughZero(
                f"{mode}: |D|/scale = {relative[low[0]]:.3e} < {floor:.0e} at omega={z:.10g}",
                mode=str(mode),
                omega=[z.real, z.imag],
                relative=float(relative[low[0]]),
                edge=[[a.real, a.imag], [b.real, b.imag]],
            )
        return g

    t = np.linspace(0.0, 1.0, max(samples, 2) + 1)
    g = sample(t)
    for _ in range(MAX_REFINEMENTS):
        step = np.angle(g[1:] / g[:-1])
        bad = np.abs(step) >= HALF_PI
        if not bad.any():
            return float(step.sum())
        mid = 0.5 * (t[:-1][bad] + t[1:][bad])
        t = np.concatenate([t, mid])
        g = np.concatenate([g, sample(mid)])
        order = np.argsort(t, kind="stable")
        t, g = t[order], g[order]

    raise ContourThroughZero(
        f"{mode}: phase steps along the edge did not resolve below pi/2",
        mode=str(mode),
        edge=[[a.real, a.imag], [b.real, b.imag]],
        samples=int(t.size),
    )


def winding_number(
    media: MediaConfig,
    mode: ModeId,
    rect: Rectangle,
    samples: int = 64,
    cache: Optional[EdgeCache] = None,
    raw: bool = False,
) -> int:
    """Winding number of G (raw=True: of D) around the rectangle boundary"""
    total = 0.0
    for edge in boundary_edges(rect):
        phase = cache.get(edge) if cache is not None and not raw else None
        if phase is None:
            phase = edge_phase(media, mode, edge, samples, raw=raw)
            if cache is not None and not raw:
                cache.put(edge, phase)
        total += phase
    turns = total / (2.0 * math.pi)
    count = int(round(turns))
    if abs(turns - count) > 1e-6:
        logger.warning(f"⚠️  {mode}: winding {turns:.8f} is not close to an integer")
    return count


def count_rectangle(
    media: MediaConfig,
    mode: ModeId,
    rect: Rectangle,
    samples: int = 64,
    cache: Optional[EdgeCache] = None,
) -> int:
    """Zeros of D inside rect, omega = 0 excluded"""
    return winding_number(media, mode, rect, samples, cache)


def count_zeros(
    media: MediaConfig, mode: ModeId, region: SearchRegion, cache: Optional[EdgeCache] = None
) -> int:
    """
    Number of transmission eigenvalues of the mode inside the region,
    counted with order.

    Raises:
        ContourThroughZero: вибірка контуру надто близько до нуля D
    """
    count = count_rectangle(media, mode, region.rectangle, region.contour_samples, cache)
    logger.debug(f"{mode}: {count} zeros in {region.rectangle.model_dump()}")
    return count
