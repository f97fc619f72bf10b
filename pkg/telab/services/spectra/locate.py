"""
Zero localization: recursive subdivision of a rectangle by winding counts,
then Newton refinement in each leaf. A leaf whose Newton run leaves it is
subdivided further instead of being given up.

Split lines are placed at 0.5 +- 1e-4 of the width/height, drawn from a
per-mode generator seeded by (seed, mode), so reruns subdivide identically.
"""
from __future__ import annotations

import math
import warnings
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import newton

from telab.config import settings
from telab.errors import ContourThroughZero, MaxDepthExceeded, NewtonDivergence
from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId
from telab.models.records import EigenRecord, UnresolvedLeaf
from telab.models.spectral import Rectangle, SearchRegion
from telab.services.dispersion import reduced_dispersion
from telab.services.spectra.contour import EdgeCache, boundary_edges, count_rectangle
from telab.utils.helpers import jitter_fraction, mode_rng

SPLIT_RETRIES = 5
JITTER = 1e-4
MOMENT_SAMPLES = 256
# leaves below this diagonal (relative to |center|) are not split further
MIN_LEAF = 1e-9
DUPLICATE_ROOT = "duplicate_root"


class LocateResult(BaseModel):
    """Located zeros of one mode in one region"""

    model_config = ConfigDict(frozen=True)

    mode: ModeId
    count: int
    records: List[EigenRecord]
    unresolved: List[UnresolvedLeaf]
    rectangle: Rectangle

    @property
    def located_order(self) -> int:
        return sum(r.zero_order for r in self.records)

    @property
    def unresolved_order(self) -> int:
        return sum(u.count for u in self.unresolved)

    @property
    def consistent(self) -> bool:
        """located + unresolved orders = winding count of the region"""
        return self.located_order + self.unresolved_order == self.count

    @property
    def complete(self) -> bool:
        """every zero counted in the region was located"""
        return self.located_order == self.count and not self.unresolved


# ============= НЬЮТОН =============


def _scalar(media: MediaConfig, mode: ModeId):
    def g(z: complex) -> complex:
        return complex(reduced_dispersion(media, mode, z)[0][0])

    def dg(z: complex) -> complex:
        return complex(reduced_dispersion(media, mode, z, derivative=True)[3][0])

    return g, dg


def relative_residual(media: MediaConfig, mode: ModeId, omega: complex) -> float:
    """|D|/scale at omega"""
    return float(reduced_dispersion(media, mode, omega)[2][0])


def newton_refine(
    media: MediaConfig,
    mode: ModeId,
    start: complex,
    order: int = 1,
    maxiter: int = 50,
) -> Tuple[complex, float, int]:
    """
    Modified Newton z <- z - order * G/G' from start.

    Returns (root, relative residual, iterations); the caller decides
    whether the root is acceptable.
    """
    g, dg = _scalar(media, mode)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        root, info = newton(
            g,
            complex(start),
            fprime=lambda z: dg(z) / order,
            tol=1e-15,
            rtol=1e-14,
            maxiter=maxiter,
            full_output=True,
            disp=False,
        )
    root = complex(root)
    if not np.isfinite(root):
        return root, math.inf, info.iterations
    return root, relative_residual(media, mode, root), info.iterations


def contour_moment(media: MediaConfig, mode: ModeId, rect: Rectangle, order: int) -> complex:
    """
    (1 / 2 pi i) closed integral of z G'/G dz / order: the mean of the zeros
    inside rect (trapezoid rule on the boundary).
    """
    total = 0j
    for a, b in boundary_edges(rect):
        t = np.linspace(0.0, 1.0, MOMENT_SAMPLES + 1)
        z = a + (b - a) * t
        g, _, _, dg = reduced_dispersion(media, mode, z, derivative=True)
        f = z * dg / g * (b - a)
        total += np.sum(0.5 * (f[1:] + f[:-1])) / MOMENT_SAMPLES
    return complex(total / (2j * math.pi * order))


def _accept(rect: Rectangle, root: complex, residual: float) -> bool:
    return residual <= settings.NEWTON_TOL and rect.contains(root, pad=1e-6 * rect.diagonal)


def refine_leaf(
    media: MediaConfig, mode: ModeId, rect: Rectangle, order: int
) -> Tuple[complex, float, int]:
    """
    Newton from the leaf center, then from the contour moment.

    Raises:
        NewtonDivergence: обидва старти не дали корінь всередині листа
    """
    root, residual, iters = newton_refine(media, mode, rect.center, order)
    if _accept(rect, root, residual):
        return root, residual, iters

    start = contour_moment(media, mode, rect, order)
    root2, residual2, iters2 = newton_refine(media, mode, start, order)
    if _accept(rect, root2, residual2):
        return root2, residual2, iters + iters2

    raise NewtonDivergence(
        f"{mode}: Newton did not converge in leaf centered at {rect.center:.8g}",
        mode=str(mode),
        center=[rect.center.real, rect.center.imag],
        order=order,
        residual=min(residual, residual2),
    )


# ============= ПІДРОЗБИТТЯ =============


class _Locator:
    def __init__(
        self,
        media: MediaConfig,
        mode: ModeId,
        samples: int,
        max_depth: int,
        seed: int,
        disk: Optional[float],
        cache: Optional[EdgeCache],
    ):
        self.media = media
        self.mode = mode
        self.samples = samples
        self.max_depth = max_depth
        self.rng = mode_rng(seed, mode)
        self.disk = disk
        self.cache = cache if cache is not None else EdgeCache()
        self.records: List[EigenRecord] = []
        self.unresolved: List[UnresolvedLeaf] = []

    def count(self, rect: Rectangle) -> int:
        return count_rectangle(self.media, self.mode, rect, self.samples, self.cache)

    def outside_disk(self, rect: Rectangle) -> bool:
        if self.disk is None:
            return False
        dx = max(rect.re_min, 0.0, -rect.re_max)
        dy = max(rect.im_min, 0.0, -rect.im_max)
        return math.hypot(dx, dy) > self.disk

    def leave_unresolved(self, rect: Rectangle, count: int, reason: str) -> None:
        self.unresolved.append(
            UnresolvedLeaf(
                mode=self.mode,
                center=rect.center,
                half_width=0.5 * max(rect.width, rect.height),
                count=count,
                reason=reason,
            )
        )

    def refine(self, rect: Rectangle, count: int) -> bool:
        try:
            root, residual, iters = refine_leaf(self.media, self.mode, rect, count)
        except NewtonDivergence as e:
            logger.debug(e.message)
            return False
        self.records.append(EigenRecord.build(root, self.mode, count, residual, iters))
        return True

    def split(self, rect: Rectangle, count: int) -> Optional[List[Tuple[Rectangle, int]]]:
        """Children with their counts; None when no split adds up"""
        for attempt in range(SPLIT_RETRIES):
            fx = jitter_fraction(self.rng, JITTER)
            fy = jitter_fraction(self.rng, JITTER)
            children = rect.split(fx, fy)
            pruned = [self.outside_disk(c) for c in children]
            try:
                counts = [0 if p else self.count(c) for c, p in zip(children, pruned)]
            except ContourThroughZero as e:
                logger.warning(f"⚠️  {self.mode}: повтор розрізу ({attempt + 1}): {e.message}")
                continue
            if sum(counts) == count or (any(pruned) and sum(counts) <= count):
                return list(zip(children, counts))
            logger.warning(
                f"⚠️  {self.mode}: children counts {counts} do not add up to {count}, re-splitting"
            )
        return None

    def too_small(self, rect: Rectangle) -> bool:
        return rect.diagonal <= MIN_LEAF * max(1.0, abs(rect.center))

    def run(self, rect: Rectangle, count: int, depth: int = 0) -> None:
        if count <= 0:
            return
        if count == 1 and self.refine(rect, 1):
            return
        if depth >= self.max_depth or self.too_small(rect):
            # a zero of order `count` survives every split
            if count > 1 and self.refine(rect, count):
                return
            reason = NewtonDivergence.code if count == 1 else MaxDepthExceeded.code
            self.leave_unresolved(rect, count, reason)
            return
        if count == 1:
            logger.debug(f"{self.mode}: Newton left leaf {rect.center:.8g}, quartering it")
        children = self.split(rect, count)
        if children is None:
            self.leave_unresolved(rect, count, ContourThroughZero.code)
            return
        for child, child_count in children:
            self.run(child, child_count, depth + 1)


def _deduplicate(records: List[EigenRecord]) -> Tuple[List[EigenRecord], List[UnresolvedLeaf]]:
    """
    Two leaves converging to one root means the zero of one of them was
    not found; the dropped twin is reported as an unresolved leaf.
    """
    kept: List[EigenRecord] = []
    lost: List[UnresolvedLeaf] = []
    for r in sorted(records, key=EigenRecord.sort_key):
        twin = next(
            (k for k in kept if abs(k.omega - r.omega) <= 1e-10 * max(1.0, abs(r.omega))), None
        )
        if twin is None:
            kept.append(r)
            continue
        logger.warning(f"⚠️  {r.mode}: zero {r.omega:.10g} found twice")
        lost.append(
            UnresolvedLeaf(
                mode=r.mode,
                center=r.omega,
                half_width=0.0,
                count=r.zero_order,
                reason=DUPLICATE_ROOT,
            )
        )
    return kept, lost


def jittered_count(
    media: MediaConfig,
    mode: ModeId,
    region: SearchRegion,
    rng: np.random.Generator,
    cache: Optional[EdgeCache] = None,
) -> Tuple[Rectangle, int]:
    """
    Count on the region, moving its edges outward by up to 1e-4 of the
    diagonal when the contour passes through a zero.

    Raises:
        ContourThroughZero: три зсуви поспіль не допомогли
    """
    rect = region.rectangle
    last: Optional[ContourThroughZero] = None
    for attempt in range(4):
        try:
            return rect, count_rectangle(media, mode, rect, region.contour_samples, cache)
        except ContourThroughZero as e:
            last = e
            d = JITTER * region.rectangle.diagonal
            shifts = d * rng.random(4)
            rect = region.rectangle.shifted(-shifts[0], shifts[1], -shifts[2], shifts[3])
            logger.warning(f"⚠️  {mode}: контур через нуль, зсув {attempt + 1}: {e.message}")
    raise last


def locate_zeros(
    media: MediaConfig,
    mode: ModeId,
    region: SearchRegion,
    seed: int = 0,
    disk: Optional[float] = None,
    cache: Optional[EdgeCache] = None,
) -> LocateResult:
    """
    All zeros of the mode in the region (omega = 0 excluded).

    disk - subrectangles lying entirely outside |omega| <= disk are skipped;
    zeros found in the remaining part are all reported.

    A count-1 leaf where Newton fails is quartered again (bounded by
    max_depth and MIN_LEAF); only then is it kept as UnresolvedLeaf with
    its count. Duplicate roots are reported the same way. Raises
    ContourThroughZero only if the region itself cannot be counted.
    """
    locator = _Locator(
        media, mode, region.contour_samples, region.max_depth, seed, disk, cache
    )
    rect, count = jittered_count(media, mode, region, locator.rng, locator.cache)
    locator.run(rect, count)

    records, lost = _deduplicate(locator.records)
    result = LocateResult(
        mode=mode,
        count=count,
        records=records,
        unresolved=sorted(locator.unresolved + lost, key=lambda u: (abs(u.center), u.center.real)),
        rectangle=rect,
    )
    if disk is None and not result.complete:
        logger.error(
            f"❌ {mode}: located order {result.located_order} of {count}, "
            f"{len(result.unresolved)} unresolved leaves"
        )
    logger.debug(
        f"{mode}: {len(records)} zeros, {len(result.unresolved)} unresolved leaves, "
        f"{locator.cache.hits} cached edges"
    )
    return result
