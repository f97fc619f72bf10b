"""
Пакет modeop - дискретний блок оператора розв'язку T_k для однієї моди

- grid: радіальна сітка Чебишова
- operator: збірка T_k, модифікована резольвента
- norms: зважені норми та їх масштабування по |k|
- spectrum: частоти, узагальнені власні вектори, перехресні перевірки
"""

from .grid import RadialGrid, build_grid
from .norms import (
    MinimalGrowthTable,
    NormScalingReport,
    minimal_growth_probe,
    norm_scaling_report,
    schatten_four_check,
    smallest_singular,
)
from .operator import ModeOperator, build_mode_operator, modified_resolvent
from .spectrum import (
    EigenBasis,
    OperatorSpectrum,
    eigs_to_frequencies,
    expansion_residual,
    generalized_eigenbasis,
)

__all__ = [
    "RadialGrid",
    "build_grid",
    "MinimalGrowthTable",
    "NormScalingReport",
    "minimal_growth_probe",
    "norm_scaling_report",
    "schatten_four_check",
    "smallest_singular",
    "ModeOperator",
    "build_mode_operator",
    "modified_resolvent",
    "EigenBasis",
    "OperatorSpectrum",
    "eigs_to_frequencies",
    "expansion_residual",
    "generalized_eigenbasis",
]
