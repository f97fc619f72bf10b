"""
Команда count - функція підрахунку N(t) та перевірка N(t) <= c t^3

Вихід: counting.json, counting.csv, count_eigenvalues.csv
"""
from __future__ import annotations

from typing import Optional

from telab.errors import CheckFailed
from telab.logger import logger
from telab.models.records import CountingReport
from telab.models.run_config import RunConfig
from telab.services.pool import WorkerPool
from telab.services.spectra.audit import EIGEN_HEADER, eigen_rows
from telab.services.spectra.counting import COUNTS_HEADER, counting_function, counting_rows
from telab.utils.writers import write_csv, write_json


def counting_payload(report: CountingReport, config: RunConfig) -> dict:
    payload = report.model_dump(mode="json")
    payload["config"] = config.echo
    payload["bound_holds"] = report.bound_holds()
    return payload


async def run_count(config: RunConfig, pool: Optional[WorkerPool] = None) -> CountingReport:
    """
    Raises:
        TruncationSuspect: з counting_function, після двох підвищень n_max
        CheckFailed: N(t) > fitted_c t^3 (внутрішня неузгодженість) або
            нерозв'язані листи підрозбиття
    """
    run = await counting_function(
        config.media,
        config.t_max,
        margin=config.margin,
        t_points=config.t_points,
        seed=config.seed,
        contour_samples=config.contour_samples,
        max_depth=config.max_depth,
        sectors=[config.sector],
        pool=pool,
    )
    report = run.report

    out = config.output_dir
    if out is not None:
        write_json(out / "counting.json", counting_payload(report, config))
        write_csv(out / "counting.csv", COUNTS_HEADER, counting_rows(report))
        write_csv(out / "count_eigenvalues.csv", EIGEN_HEADER, eigen_rows(run.records))

    if not report.bound_holds():
        raise CheckFailed("N(t) <= fitted_c t^3 violated", fitted_c=report.fitted_c)
    if report.unresolved:
        raise CheckFailed(
            f"{report.unresolved} subdivision leaves left unresolved", unresolved=report.unresolved
        )
    logger.info(f"📊 Count: N({config.t_max}) = {report.counts[-1]}")
    return report
