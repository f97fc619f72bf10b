"""
Конфігурація лабораторії через .env файл

Тут лише налаштування процесу: логування, кількість потоків, числові
пороги за замовчуванням. Параметри конкретного прогону (середовища, k,
області пошуку) живуть у файлі конфігурації прогону, див.
telab/models/run_config.py.

Приклад .env:
    LOG_LEVEL=DEBUG
    LOG_TO_FILE=True
    THREADS=4
"""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# ========================================
# КОРІНЬ ПРОЕКТУ
# ========================================
# telab/config.py -> telab/ -> корінь (де .env)
PROJECT_ROOT = Path(__file__).parent.parent


class Settings(BaseSettings):
    """
    Налаштування лабораторії

    Всі поля мають значення за замовчуванням, тому .env не обов'язковий.
    """

    # ========================================
    # ЛОГУВАННЯ
    # ========================================

    LOG_LEVEL: str = "INFO"
    """DEBUG, INFO, WARNING, ERROR"""

    LOG_TO_FILE: bool = False
    """Якщо True - логи також пишуться в LOGS_DIR з ротацією"""

    LOGS_DIR: Path = PROJECT_ROOT / "logs"

    DEBUG: bool = False

    # ========================================
    # ПАРАЛЕЛІЗМ
    # ========================================

    THREADS: int = 1
    """Розмір пулу воркерів; прапорець --threads має пріоритет"""

    # ========================================
    # ЧИСЛОВІ ПОРОГИ
    # ========================================

    CONDITION_H_MARGIN: float = 1e-6
    """Відносний запас для трьох контрастів умови (H)"""

    COND_LIMIT: float = 1e12
    """Межа оцінки числа обумовленості для факторизацій"""

    CONTOUR_FLOOR: float = 1e-8
    """Мінімум |D|/scale на контурі аргументного принципу"""

    NEWTON_TOL: float = Field(default=1e-8, gt=0, le=1e-8)
    """Залишок |D|/scale, при якому ньютонівське уточнення зупиняється (не більше 1e-8)"""

    DEFAULT_GRID_SIZE: int = 64

    model_config = SettingsConfigDict(
        env_file=str(PROJECT_ROOT / ".env"),
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False,
    )


# ========================================
# СТВОРЕННЯ ОБ'ЄКТА НАЛАШТУВАНЬ
# ========================================

try:
    settings = Settings()

except Exception as e:
    print("❌ ПОМИЛКА КОНФІГУРАЦІЇ!")
    print(f"   {e}")
    print()
    print("💡 Перевірте значення в .env:")
    print(f"   {PROJECT_ROOT / '.env'}")
    print("   (наприклад THREADS має бути цілим числом, LOG_TO_FILE - True/False)")
    raise
