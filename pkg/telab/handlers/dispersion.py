"""
Команда dispersion - трасування D на відрізку

Відрізок задається re_min/im_min (початок) та re_max/im_max (кінець),
за замовчуванням [0.1, 10]/R на дійсній осі.

Вихід: dispersion_trace.csv, dispersion_summary.json
"""
from __future__ import annotations

from typing import List, Optional

from telab.logger import logger
from telab.models.run_config import RunConfig, segment_from
from telab.services.dispersion import (
    TRACE_HEADER,
    dispersion_trace,
    impedance_probe,
    real_axis_zeros,
    reduced_at_origin,
    trace_rows,
)
from telab.services.pool import WorkerPool
from telab.utils.writers import write_csv, write_json

PROBE_CONTRASTS = [0.5, 0.1, 0.01, 0.001]


def _mode_summary(config: RunConfig, mode, start: complex, stop: complex) -> tuple:
    values = dispersion_trace(config.media, mode, start, stop, config.samples)
    summary = {
        "mode": str(mode),
        "min_relative": min(v.relative for v in values),
        "origin_reduced": reduced_at_origin(config.media, mode),
    }
    if start.imag == 0.0 and stop.imag == 0.0:
        lo, hi = sorted((start.real, stop.real))
        summary["real_zeros"] = real_axis_zeros(config.media, mode, lo, hi)
    return values, summary


async def run_dispersion(config: RunConfig, pool: Optional[WorkerPool] = None) -> dict:
    start, stop = segment_from(config)
    logger.info(f"📈 Dispersion: {len(config.modes)} мод, відрізок {start} -> {stop}")

    rows: List[list] = []
    modes = []
    for mode in config.modes:
        values, summary = _mode_summary(config, mode, start, stop)
        rows += trace_rows(values)
        modes.append(summary)

    payload = {
        "command": "dispersion",
        "config": config.echo,
        "segment": [start, stop],
        "samples": config.samples,
        "modes": modes,
        "impedance_probe": [
            {"contrast": c, "min_relative": floor}
            for c, floor in impedance_probe(config.media, PROBE_CONTRASTS)
        ],
    }
    out = config.output_dir
    if out is not None:
        write_csv(out / "dispersion_trace.csv", TRACE_HEADER, rows)
        write_json(out / "dispersion_summary.json", payload)
    logger.info(f"✅ Dispersion: {len(rows)} точок")
    return payload
