"""
Функція підрахунку N(t) = #{ omega : |omega| <= t } з кратностями

Кожна мода шукається лише в першому квадранті: прямокутник
[-eta, t_max + eta] x [-eta, t_max + eta], де eta ~ 0.05/R. Нулі D
симетричні відносно omega -> -omega та omega -> conj(omega), тому решта
орбіти добудовується. Підпрямокутники поза диском |omega| <= t_max
пропускаються.
"""
from __future__ import annotations

import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from telab.errors import TruncationSuspect
from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId, mode_list
from telab.models.records import CountingReport, EigenRecord
from telab.models.spectral import SearchRegion, SectorSpec
from telab.services.pool import WorkerPool
from telab.services.spectra.audit import sector_audit
from telab.services.spectra.locate import LocateResult, locate_zeros
from telab.utils.helpers import least_upper_ratio, mode_rng, safe_slope

MAX_TRUNCATION_RETRIES = 2
ORBIT_TOL = 1e-9
COUNTS_HEADER = ["t", "count"]


def n_max_for(media: MediaConfig, t_max: float, margin: float) -> int:
    """ceil(margin t_max R max(sqrt(eps mu), sqrt(eps_hat mu_hat))) + 5"""
    return math.ceil(margin * t_max * media.radius * media.max_index) + 5


def t_grid_for(t_max: float, t_points: int) -> List[float]:
    return [float(t) for t in np.linspace(t_max / t_points, t_max, t_points)]


# ============= ПОШУК В КВАДРАНТІ =============


class QuadrantTask(BaseModel):
    """Одна задача пулу: всі нулі моди в першому квадранті диска"""

    model_config = ConfigDict(frozen=True)

    media: MediaConfig
    mode: ModeId
    t_max: float
    seed: int = 0
    contour_samples: int = 64
    max_depth: int = 24


def quadrant_region(task: QuadrantTask) -> SearchRegion:
    rng = mode_rng(task.seed, task.mode, salt=1)
    eta = 0.05 * (1.0 + 0.1 * rng.random()) / task.media.radius
    return SearchRegion.from_bounds(
        -eta,
        task.t_max + eta,
        -eta,
        task.t_max + eta,
        radius=task.media.radius,
        contour_samples=task.contour_samples,
        max_depth=task.max_depth,
    )


def quadrant_task(task: QuadrantTask) -> LocateResult:
    """Верхній рівень модуля, щоб ProcessPoolExecutor міг її серіалізувати"""
    return locate_zeros(
        task.media,
        task.mode,
        quadrant_region(task),
        seed=task.seed,
        disk=task.t_max,
    )


def _tol(omega: complex) -> float:
    return ORBIT_TOL * max(1.0, abs(omega))


def complete_orbits(records: Iterable[EigenRecord]) -> List[EigenRecord]:
    """
    Keeps first-quadrant zeros (Re, Im >= -tol) and adds -omega, conj(omega),
    -conj(omega); points of an orbit closer than tol are merged.
    """
    out: List[EigenRecord] = []
    for r in records:
        if r.omega.real < -_tol(r.omega) or r.omega.imag < -_tol(r.omega):
            continue
        points: List[complex] = []
        for w in (r.omega, -r.omega, r.omega.conjugate(), -r.omega.conjugate()):
            if all(abs(w - p) > _tol(w) for p in points):
                points.append(w)
        for w in points:
            out.append(r.model_copy(update={"omega": w}))
    return sorted(out, key=EigenRecord.sort_key)


def count_on_grid(records: Sequence[EigenRecord], t_grid: Sequence[float]) -> List[int]:
    """Multiplicity-weighted N(t) at every grid point"""
    radii = np.array([abs(r.omega) for r in records])
    weights = np.array([r.multiplicity for r in records], dtype=int)
    return [int(weights[radii <= t].sum()) if len(records) else 0 for t in t_grid]


# ============= ЗВІТ =============


class CountingRun(BaseModel):
    """Звіт разом із записами, з яких його пораховано"""

    model_config = ConfigDict(frozen=True)

    report: CountingReport
    records: List[EigenRecord]
    results: List[LocateResult]


def _suspect(results: Sequence[LocateResult], n_max: int, t_max: float) -> bool:
    return any(
        r.mode.degree == n_max and any(abs(e.omega) <= t_max for e in r.records)
        for r in results
    )


async def counting_function(
    media: MediaConfig,
    t_max: float,
    margin: float = 1.3,
    t_points: int = 40,
    seed: int = 0,
    contour_samples: int = 64,
    max_depth: int = 24,
    sectors: Sequence[SectorSpec] = (),
    pool: Optional[WorkerPool] = None,
) -> CountingRun:
    """
    Raises:
        ValueError: t_max <= 0
        TruncationSuspect: мода n_max все ще має нуль з |omega| <= t_max
            після MAX_TRUNCATION_RETRIES підвищень n_max
    """
    if t_max <= 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    pool = pool or WorkerPool(1)

    n_max = n_max_for(media, t_max, margin)
    logger.info(f"🔢 Підрахунок N(t): t_max={t_max}, моди n <= {n_max}")

    def tasks(n_lo: int, n_hi: int) -> List[QuadrantTask]:
        return [
            QuadrantTask(
                media=media,
                mode=mode,
                t_max=t_max,
                seed=seed,
                contour_samples=contour_samples,
                max_depth=max_depth,
            )
            for mode in mode_list(n_lo, n_hi)
        ]

    results: List[LocateResult] = list(await pool.map(quadrant_task, tasks(1, n_max)))
    retries = 0
    while _suspect(results, n_max, t_max):
        if retries == MAX_TRUNCATION_RETRIES:
            raise TruncationSuspect(
                f"mode n={n_max} still has a zero with |omega| <= {t_max} "
                f"after {retries} retries",
                n_max=n_max,
                t_max=t_max,
                retries=retries,
            )
        raised = n_max + max(5, n_max // 4)
        logger.warning(f"⚠️  Підозра на усічення: n_max {n_max} -> {raised}")
        results += await pool.map(quadrant_task, tasks(n_max + 1, raised))
        n_max = raised
        retries += 1

    results.sort(key=lambda r: r.mode.sort_key())
    unresolved = sum(len(r.unresolved) for r in results)
    if unresolved:
        logger.warning(f"⚠️  {unresolved} нерозв'язаних листів підрозбиття")

    records = complete_orbits(e for r in results for e in r.records)
    in_disk = [r for r in records if abs(r.omega) <= t_max]
    t_grid = t_grid_for(t_max, t_points)
    counts = count_on_grid(in_disk, t_grid)

    upper = len(t_grid) // 2
    slope = safe_slope(t_grid[upper:], counts[upper:])
    audit = [sector_audit(in_disk, spec).row() for spec in sectors]

    report = CountingReport(
        media=media.as_dict(),
        t_grid=t_grid,
        counts=counts,
        fitted_slope=slope,
        fitted_c=least_upper_ratio(t_grid, counts),
        truncation_degree=n_max,
        truncation_retries=retries,
        unresolved=unresolved,
        sector_audit=audit,
    )
    slope_text = "null" if slope is None else f"{slope:.3f}"
    logger.info(
        f"✅ N({t_max}) = {counts[-1]}, нахил {slope_text}, c = {report.fitted_c:.4g}"
    )
    return CountingRun(report=report, records=in_disk, results=results)


def counting_rows(report: CountingReport) -> List[Tuple[float, int]]:
    return list(zip(report.t_grid, report.counts))
