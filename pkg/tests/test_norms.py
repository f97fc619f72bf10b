import cmath
import math

import numpy as np
import pytest

from telab.errors import SectorViolation
from telab.services.modeop.grid import build_grid
from telab.services.modeop.norms import (
    NormScalingReport,
    h1_norm,
    h2_norm,
    hs_norm,
    minimal_growth_probe,
    norm_scaling_report,
    op_norm,
    schatten_four_check,
    smallest_singular,
    vector_norm,
)
from telab.services.modeop.operator import shifted_operator


def test_schatten_four_bounded_by_frobenius(te1_operator):
    check = schatten_four_check(te1_operator)
    assert check.holds
    assert check.schatten4 > 0


def test_norm_dominates_spectral_radius(te1_operator):
    radius = float(np.abs(np.linalg.eigvals(te1_operator.matrix)).max())
    assert op_norm(te1_operator) >= radius * (1.0 - 1e-10)


def test_block_is_injective(te1_operator):
    assert smallest_singular(te1_operator) > 0


def test_hs_norm_of_square_below_product(te1_operator):
    n = op_norm(te1_operator)
    assert hs_norm(te1_operator, 2) <= math.sqrt(te1_operator.size) * n * n * (1.0 + 1e-10)


def test_sobolev_surrogates_dominate_l2(te1_operator):
    assert h1_norm(te1_operator) >= op_norm(te1_operator) * (1.0 - 1e-10)
    assert h2_norm(te1_operator) > 0


def test_vector_norm_is_homogeneous(te1_operator, rng):
    y = rng.standard_normal(te1_operator.size) + 0j
    assert vector_norm(te1_operator, 2j * y) == pytest.approx(2.0 * vector_norm(te1_operator, y))


@pytest.mark.parametrize("theta, power", [(0.0, 1), (math.pi / 2, 1), (math.pi / 4, 3)])
def test_minimal_growth_rejects_bad_direction(te1_operator, theta, power):
    with pytest.raises(ValueError):
        minimal_growth_probe(te1_operator, theta, [1.0], power=power)


def test_minimal_growth_at_small_r(te1_operator):
    table = minimal_growth_probe(te1_operator, math.pi / 4, [1e-6])
    assert table.products[0] == pytest.approx(1e-6 * op_norm(te1_operator), rel=1e-5)


def test_minimal_growth_matches_shifted_block(te1_operator):
    theta = math.pi / 4
    table = minimal_growth_probe(te1_operator, theta, [1.0, 4.0])
    for r, product in table.rows():
        shifted = shifted_operator(te1_operator, r * cmath.exp(1j * theta))
        assert product == pytest.approx(r * op_norm(te1_operator, shifted.matrix), rel=1e-6)
    assert table.bound == max(table.products)


def test_minimal_growth_of_square(te1_operator):
    table = minimal_growth_probe(te1_operator, math.pi / 4, [1e-6], power=2)
    t2 = te1_operator.matrix @ te1_operator.matrix
    assert table.products[0] == pytest.approx(1e-6 * op_norm(te1_operator, t2), rel=1e-5)


def test_scaling_rejects_ray_outside_sector(media, te1, grid):
    with pytest.raises(SectorViolation):
        norm_scaling_report(media, te1, 10.0, [10.0, 20.0], grid)


def test_scaling_report_validates_lengths(te1):
    with pytest.raises(ValueError):
        NormScalingReport(
            mode=te1,
            k_values=[10j],
            op_norm_L2=[1.0, 2.0],
            hs_norm_T2=[1.0],
            h1_norm_T=[1.0],
            h2_norm_T2=[1.0],
            fitted_slopes=[0.0, 0.0, 0.0, 0.0],
            combined_bounds=[[1.0, 1.0]],
        )


def test_spread():
    assert NormScalingReport.spread([2.0, 8.0, 4.0]) == 4.0


def test_sobolev_surrogates_stay_bounded_in_k(media, te1):
    report = norm_scaling_report(media, te1, 45.0, [10.0, 40.0], build_grid(1.0, 32))
    assert report.spread(report.h1_norm_T) <= 10.0
    assert report.spread(report.h2_norm_T2) <= 10.0
    assert report.op_norm_L2[1] < report.op_norm_L2[0]


@pytest.mark.slow
def test_norms_decay_along_diagonal_ray(media, te1):
    report = norm_scaling_report(media, te1, 45.0, [10.0, 20.0, 40.0, 80.0], build_grid(1.0, 64))
    slopes = report.fitted_slopes
    assert slopes[0] <= -0.8
    assert slopes[1] <= -0.4
    assert len(report.rows()) == 4
    assert report.spread(report.h1_norm_T) <= 10.0
    assert report.spread(report.h2_norm_T2) <= 10.0
