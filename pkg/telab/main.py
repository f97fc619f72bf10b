"""
Точка входу CLI

    telab --config run.conf --out results/ [--threads 4] [--seed 7]

Всі числові параметри живуть у файлі конфігурації (див. telab.models.run_config),
прапорці задають лише куди писати, скільки процесів та seed.

Коди виходу: 0 - все пройшло, 1 - перевірка не пройшла,
2 - помилка конфігурації, 3 - числова помилка.
Винятки numpy/scipy з обчислень (LinAlgError, ValueError, ArithmeticError)
теж дають код 3 та error.json.
"""
from __future__ import annotations

import argparse
import asyncio
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from telab import __version__
from telab.config import settings
from telab.errors import LabError, NumericalFailure
from telab.handlers import HANDLERS
from telab.logger import logger, setup_logger
from telab.models.run_config import load_run_config
from telab.services.pool import WorkerPool
from telab.utils.writers import dumps, write_json

NUMERICAL_EXCEPTIONS = (np.linalg.LinAlgError, ValueError, ArithmeticError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telab",
        description="Transmission eigenvalues of a ball: dispersion zeros and solution-operator spectra",
    )
    parser.add_argument("--config", type=Path, required=True, help="файл конфігурації прогону")
    parser.add_argument("--out", type=Path, required=True, help="каталог для CSV/JSON")
    parser.add_argument("--threads", type=int, default=None, help="кількість процесів (THREADS з .env)")
    parser.add_argument("--seed", type=int, default=None, help="перевизначає seed з конфігурації")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def report_error(err: LabError, out: Optional[Path]) -> int:
    """error.json + stderr; повертає код виходу помилки"""
    payload = err.to_dict()
    if out is not None:
        try:
            write_json(out / "error.json", payload)
        except OSError as exc:
            logger.error(f"❌ Не вдалося записати error.json: {exc}")
    sys.stderr.write(dumps(payload))
    return err.exit_code


async def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logger()

    logger.info("=" * 50)
    logger.info(f"🔬 TELAB {__version__}")
    logger.info("=" * 50)
    logger.info("📝 Конфігурація завантажена:")
    logger.info(f"   LOG_LEVEL = {settings.LOG_LEVEL}")
    logger.info(f"   THREADS = {args.threads or settings.THREADS}")

    try:
        config = load_run_config(args.config, seed=args.seed).with_output(args.out)
    except LabError as err:
        logger.error(f"❌ Конфігурація: {err.message}")
        return report_error(err, args.out)

    logger.info(f"   command = {config.command}, seed = {config.seed}")
    handler = HANDLERS[config.command]
    started = time.perf_counter()
    try:
        async with WorkerPool(args.threads) as pool:
            await handler(config, pool)
    except LabError as err:
        logger.error(f"❌ {config.command}: {err.message}")
        return report_error(err, args.out)
    except NUMERICAL_EXCEPTIONS as exc:
        err = NumericalFailure.wrap(exc)
        logger.exception(f"❌ {config.command}: {err.message}")
        return report_error(err, args.out)

    logger.info(f"✅ {config.command} завершено за {time.perf_counter() - started:.1f} с -> {args.out}")
    return 0


def cli() -> None:
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        logger.warning("⚠️  Отримано сигнал зупинки (Ctrl+C)...")
        sys.exit(130)


if __name__ == "__main__":
    cli()
