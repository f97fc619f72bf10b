"""
Логування через loguru

Два виходи:
1. Консоль (stderr) - кольорові логи
2. Файл LOGS_DIR/telab_YYYY-MM-DD.log - якщо LOG_TO_FILE=True

Використання:
    from telab.logger import logger

    logger.info("Старт прогону")
    logger.debug(f"Мода {mode} побудована за {dt:.2f} с")
"""

import sys

from loguru import logger

from telab.config import settings

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function} - {message}"


def setup_logger(level: str | None = None, to_file: bool | None = None):
    """
    Налаштовує loguru заново (можна викликати повторно, наприклад з CLI)

    level, to_file - перевизначають значення з settings
    """
    level = (level or settings.LOG_LEVEL).upper()
    to_file = settings.LOG_TO_FILE if to_file is None else to_file

    # Видалити стандартний handler (і наші попередні, якщо були)
    logger.remove()

    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level, colorize=True)

    if to_file:
        settings.LOGS_DIR.mkdir(parents=True, exist_ok=True)
        logger.add(
            str(settings.LOGS_DIR / "telab_{time:YYYY-MM-DD}.log"),
            rotation="00:00",
            retention="30 days",
            compression="zip",
            level=level,
            format=FILE_FORMAT,
        )
        logger.debug(f"📁 Логи зберігаються в: {settings.LOGS_DIR}")

    if settings.DEBUG:
        logger.warning("⚠️  DEBUG режим увімкнено!")

    return logger


setup_logger()
