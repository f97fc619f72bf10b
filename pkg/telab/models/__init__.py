"""
Доменні моделі лабораторії

Експортуємо всі моделі для зручного імпорту:
    from telab.models import MediaConfig, ModeId, EigenRecord

Моделі:
- MediaConfig - параметри двох середовищ і радіус кулі
- ModeId - степінь гармоніки та поляризація
- SpectralParameter, SectorSpec, Rectangle, SearchRegion - k та області пошуку
- DispersionValue, EigenRecord, CountingReport - результати
- RunConfig - розібраний файл конфігурації прогону
"""

from telab.models.media import MediaConfig, validate_media
from telab.models.mode import ModeId, Polarization, mode_list
from telab.models.records import (
    CountingReport,
    DispersionValue,
    EigenRecord,
    SectorAuditRow,
    UnresolvedLeaf,
)
from telab.models.run_config import RunConfig, load_run_config, parse_run_config
from telab.models.spectral import (
    Rectangle,
    SearchRegion,
    SectorSpec,
    SpectralParameter,
    validate_k,
)

__all__ = [
    "MediaConfig",
    "validate_media",
    "ModeId",
    "Polarization",
    "mode_list",
    "CountingReport",
    "DispersionValue",
    "EigenRecord",
    "SectorAuditRow",
    "UnresolvedLeaf",
    "RunConfig",
    "load_run_config",
    "parse_run_config",
    "Rectangle",
    "SearchRegion",
    "SectorSpec",
    "SpectralParameter",
    "validate_k",
]
