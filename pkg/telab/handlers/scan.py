"""
Команда scan - пошук власних значень в області та звірка з оператором

Для кожної моди:
1. locate_zeros на області з конфігурації (нулі D)
2. власні значення блоку T_k, підтверджені дисперсією (|D|/scale <= 1e-6)
3. зіставлення двох множин у межах області

Вихід: eigenvalues.csv, scan_summary.json
"""
from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from telab.errors import CheckFailed, LabError
from telab.logger import logger
from telab.models.media import MediaConfig
from telab.models.mode import ModeId
from telab.models.run_config import RunConfig
from telab.models.spectral import SearchRegion, SpectralParameter
from telab.services.modeop.grid import build_grid
from telab.services.modeop.operator import build_mode_operator
from telab.services.modeop.spectrum import (
    CONFIRM_TOL,
    confirmed_frequencies,
    eigs_to_frequencies,
    match_frequencies,
)
from telab.services.pool import WorkerPool
from telab.services.spectra.audit import EIGEN_HEADER, eigen_rows
from telab.services.spectra.contour import corners
from telab.services.spectra.locate import LocateResult, locate_zeros
from telab.utils.writers import write_csv, write_json

CROSS_PATH_TOL = 1e-6


class ScanTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    media: MediaConfig
    mode: ModeId
    region: SearchRegion
    spectral: SpectralParameter
    grid_size: int
    seed: int


class ModeScan(BaseModel):
    """Результат однієї моди: нулі D та звірка з оператором"""

    model_config = ConfigDict(frozen=True)

    located: LocateResult
    operator_frequencies: List[complex]
    matched: int
    max_deviation: float
    unmatched_dispersion: List[complex]
    unmatched_operator: List[complex]
    operator_error: Optional[dict] = None


def scan_task(task: ScanTask) -> ModeScan:
    located = locate_zeros(task.media, task.mode, task.region, seed=task.seed)
    rect = task.region.rectangle
    zeros = [r.omega for r in located.records]

    try:
        op = build_mode_operator(
            task.media, task.mode, task.spectral, build_grid(task.media.radius, task.grid_size)
        )
    except LabError as err:
        logger.warning(f"⚠️  {task.mode}: оператор не побудовано: {err.message}")
        return ModeScan(
            located=located,
            operator_frequencies=[],
            matched=0,
            max_deviation=0.0,
            unmatched_dispersion=zeros,
            unmatched_operator=[],
            operator_error=err.to_dict(),
        )

    spectrum = eigs_to_frequencies(op)
    reach = max(abs(c) for c in corners(rect))
    confirmed = confirmed_frequencies(op, spectrum, reach, CONFIRM_TOL)
    operator = [w for w in confirmed if rect.contains(w)]
    pairs, only_dispersion, only_operator = match_frequencies(zeros, operator, CROSS_PATH_TOL)

    return ModeScan(
        located=located,
        operator_frequencies=operator,
        matched=len(pairs),
        max_deviation=max((abs(a - b) for a, b in pairs), default=0.0),
        unmatched_dispersion=only_dispersion,
        unmatched_operator=only_operator,
    )


async def run_scan(config: RunConfig, pool: Optional[WorkerPool] = None) -> dict:
    """
    Raises:
        CheckFailed: порядок знайдених нулів не збігається з підрахунком
            або оператор і дисперсія розходяться (файли вже записано, status=failed)
    """
    pool = pool or WorkerPool(1)
    region = config.region
    logger.info(f"🔍 Scan: {len(config.modes)} мод, область {region.rectangle.model_dump()}")

    tasks = [
        ScanTask(
            media=config.media,
            mode=mode,
            region=region,
            spectral=config.spectral,
            grid_size=config.grid_size,
            seed=config.seed,
        )
        for mode in config.modes
    ]
    scans: List[ModeScan] = await pool.map(scan_task, tasks)

    records = [r for s in scans for r in s.located.records]
    inconsistent = [str(s.located.mode) for s in scans if not s.located.complete]
    diverging = [
        str(s.located.mode)
        for s in scans
        if s.max_deviation > CROSS_PATH_TOL or s.unmatched_dispersion or s.unmatched_operator
    ]

    per_mode = [
        {
            "mode": str(s.located.mode),
            "count": s.located.count,
            "located_order": s.located.located_order,
            "unresolved": s.located.unresolved,
            "operator_matched": s.matched,
            "max_deviation": s.max_deviation,
            "unmatched_dispersion": s.unmatched_dispersion,
            "unmatched_operator": s.unmatched_operator,
            "operator_error": s.operator_error,
        }
        for s in scans
    ]
    summary = {
        "command": "scan",
        "config": config.echo,
        "status": "failed" if inconsistent or diverging else "passed",
        "modes": per_mode,
        "cross_path": {
            "max_deviation": max((s.max_deviation for s in scans), default=0.0),
            "matched": sum(s.matched for s in scans),
            "tolerance": CROSS_PATH_TOL,
            "confirm_tolerance": CONFIRM_TOL,
        },
        "inconsistent_modes": inconsistent,
        "diverging_modes": diverging,
    }

    out = config.output_dir
    if out is not None:
        write_csv(out / "eigenvalues.csv", EIGEN_HEADER, eigen_rows(records))
        write_json(out / "scan_summary.json", summary)

    logger.info(
        f"✅ Scan: {len(records)} нулів, звірка max |dw| = "
        f"{summary['cross_path']['max_deviation']:.2e}"
    )
    if inconsistent or diverging:
        raise CheckFailed(
            "scan cross-checks failed",
            inconsistent_modes=inconsistent,
            diverging_modes=diverging,
        )
    return summary
