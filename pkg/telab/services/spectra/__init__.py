"""
Пакет spectra - нулі дисперсійних функцій та статистика спектру

- contour: підрахунок нулів за принципом аргументу
- locate: підрозбиття прямокутників та уточнення Ньютоном
- counting: функція підрахунку N(t) та нахил у лог-лог масштабі
- audit: сектор без власних значень, суми Шаттена, симетрія орбіт
"""

from .audit import EIGEN_HEADER, eigen_rows, missing_partners, schatten_tail_check, sector_audit
from .contour import EdgeCache, count_zeros, origin_order, winding_number
from .counting import CountingRun, counting_function, n_max_for
from .locate import LocateResult, locate_zeros

__all__ = [
    "EIGEN_HEADER",
    "eigen_rows",
    "missing_partners",
    "schatten_tail_check",
    "sector_audit",
    "EdgeCache",
    "count_zeros",
    "origin_order",
    "winding_number",
    "CountingRun",
    "counting_function",
    "n_max_for",
    "LocateResult",
    "locate_zeros",
]
