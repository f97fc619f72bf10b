"""
Помилки лабораторії

Кожна помилка має машинозчитуваний code, exit_code для CLI та details.
CLI перетворює будь-яку LabError на error.json + відповідний код виходу:
    0 - все пройшло, 1 - перевірка не пройшла,
    2 - помилка конфігурації, 3 - числова помилка
"""
from typing import Any, Dict, Optional


class LabError(Exception):
    """Базова помилка лабораторії"""

    code = "lab_error"
    exit_code = 3

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, "details": self.details}


# ============= КОНФІГУРАЦІЯ (exit 2) =============

class ConfigError(LabError):
    """Файл конфігурації прогону не розібрано або значення невалідне"""

    code = "config_error"
    exit_code = 2

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        text = f"{message} ({', '.join(where)})" if where else message
        super().__init__(text, key=key, line=line)
        self.key = key
        self.line = line


class NonElliptic(LabError):
    """Коефіцієнт середовища не додатний"""

    code = "non_elliptic"
    exit_code = 2

    def __init__(self, field: str, value: float):
        super().__init__(f"coefficient {field}={value} must be > 0", field=field, value=value)
        self.field = field


class ConditionHViolated(LabError):
    """Один з трьох контрастів умови (H) зникає в межах запасу"""

    code = "condition_h_violated"
    exit_code = 2

    def __init__(self, clause: str, lhs: float, rhs: float, margin: float):
        super().__init__(
            f"condition (H) clause '{clause}' violated: {lhs} ~ {rhs} within relative margin {margin}",
            clause=clause,
            lhs=lhs,
            rhs=rhs,
            margin=margin,
        )
        self.clause = clause


class SectorViolation(LabError):
    """k лежить поза сектором |Im(k^2)| >= gamma |k|^2"""

    code = "sector_violation"
    exit_code = 2


class MagnitudeTooSmall(LabError):
    """|k| < k_min"""

    code = "magnitude_too_small"
    exit_code = 2


class RegionError(LabError):
    """Прямокутник пошуку порожній або перетинає виключений диск навколо 0"""

    code = "region_error"
    exit_code = 2


# ============= ЧИСЛОВІ (exit 3) =============

class OrderOverflow(LabError):
    code = "order_overflow"


class IllConditionedSolve(LabError):
    """Оцінка обумовленості факторизації перевищила межу"""

    code = "ill_conditioned_solve"


class ModifiedResolventSingular(LabError):
    """1/s надто близько до власного значення T (I - sT вироджена)"""

    code = "modified_resolvent_singular"


class ChainExtractionIllConditioned(LabError):
    code = "chain_extraction_ill_conditioned"


class ContourThroughZero(LabError):
    """Вибірка контуру потрапила в нуль |D|/scale < floor"""

    code = "contour_through_zero"


class NewtonDivergence(LabError):
    code = "newton_divergence"


class MaxDepthExceeded(LabError):
    code = "max_depth_exceeded"


class TruncationSuspect(LabError):
    """Мода n_max дала нуль з |omega| <= t_max - усічення підозріле"""

    code = "truncation_suspect"


class NumericalFailure(LabError):
    """Виняток numpy/scipy (LinAlgError, ValueError, ...), що вийшов з обчислень"""

    code = "numerical_failure"

    @classmethod
    def wrap(cls, exc: BaseException) -> "NumericalFailure":
        return cls(f"{type(exc).__name__}: {exc}", exception=type(exc).__name__)


# ============= ПЕРЕВІРКИ (exit 1) =============

class CheckFailed(LabError):
    code = "check_failed"
    exit_code = 1
