import cmath
import math

import numpy as np
import pytest

from telab.errors import ModifiedResolventSingular
from telab.models.spectral import ray_point, validate_k
from telab.services.modeop.grid import build_grid
from telab.services.modeop.operator import (
    build_mode_operator,
    collocation_residual,
    matching_defect,
    modified_resolvent,
    shifted_operator,
)
from telab.services.modeop.spectrum import (
    grid_refinement_check,
    polynomial_source,
    resolvent_identity_deviation,
)


def test_block_size(te1_operator):
    assert te1_operator.size == 4 * 32 - 2
    assert te1_operator.structure.lift.shape == (4 * 32, 4 * 32 - 2)
    assert math.isfinite(te1_operator.condition)


def test_zero_source_gives_zero(te1_operator):
    out = te1_operator.apply(np.zeros(te1_operator.size))
    assert not np.any(out)


def test_collocation_residual_small(te1_operator, rng):
    source = polynomial_source(te1_operator, rng)
    assert collocation_residual(te1_operator, source) <= 1e-8


def test_lifted_solution_satisfies_matching(te1_operator, rng):
    source = polynomial_source(te1_operator, rng)
    x = te1_operator.lifted(te1_operator.apply(source))
    assert matching_defect(te1_operator, source) <= 1e-8 * max(1.0, float(np.abs(x).max()))


def test_tm_block_is_te_block_of_dual_media(media, te1, tm1, spectral, grid):
    tm = build_mode_operator(media, tm1, spectral, grid)
    te = build_mode_operator(media.dual(), te1, spectral, grid)
    assert np.array_equal(tm.matrix, te.matrix)


def test_zero_shift_returns_operator(te1_operator):
    res = modified_resolvent(te1_operator, 0.0)
    assert np.array_equal(res, te1_operator.matrix)


def test_shifted_operator_moves_k(te1_operator):
    s = 5.0 * cmath.exp(1j * math.pi / 4)
    shifted = shifted_operator(te1_operator, s)
    assert shifted.k == pytest.approx(te1_operator.k + s)
    assert shifted.structure is te1_operator.structure


def test_resolvent_identity(te1_operator):
    deviation = resolvent_identity_deviation(te1_operator, 5.0 * cmath.exp(1j * math.pi / 4))
    assert deviation["relative"] <= 1e-8
    assert deviation["sides"] <= 1e-9


def test_resolvent_singular_at_inverse_eigenvalue(te1_operator):
    mus = np.linalg.eigvals(te1_operator.matrix)
    top = complex(mus[np.argmax(np.abs(mus))])
    with pytest.raises(ModifiedResolventSingular) as exc:
        modified_resolvent(te1_operator, 1.0 / top)
    assert exc.value.exit_code == 3


@pytest.mark.slow
def test_grid_refinement(media, te1, spectral):
    report = grid_refinement_check(media, te1, spectral, 64)
    assert report["eigen_unmatched"] == 0
    assert report["eigen_compared"] > 0
    assert report["eigen_deviation"] <= 1e-6
    assert report["action_deviation"] <= 1e-6


def test_grid_cache_shared():
    assert build_grid(1.0, 32) is build_grid(1.0, 32)
