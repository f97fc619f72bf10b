import pytest

import telab.services.spectra.locate as locate_module
from telab.config import settings
from telab.errors import NewtonDivergence
from telab.models.mode import mode_list
from telab.models.records import EigenRecord, UnresolvedLeaf
from telab.models.spectral import Rectangle, SearchRegion
from telab.services.dispersion import real_axis_zeros
from telab.services.spectra.locate import (
    DUPLICATE_ROOT,
    LocateResult,
    _deduplicate,
    contour_moment,
    jittered_count,
    locate_zeros,
    newton_refine,
    refine_leaf,
    relative_residual,
)

REGION = SearchRegion.from_bounds(0.537, 6.213, -1.071, 0.983)


@pytest.fixture(scope="module")
def located(media, te1):
    return locate_zeros(media, te1, REGION, seed=7)


def test_located_orders_add_up(located):
    assert located.consistent
    assert located.complete
    assert located.count > 0
    assert not located.unresolved


def test_records_are_accurate(located):
    for record in located.records:
        assert record.residual <= settings.NEWTON_TOL
        assert REGION.rectangle.contains(record.omega, pad=1e-6)
        assert record.multiplicity == record.zero_order * 3


def test_real_zeros_match_oracle(media, te1, located):
    oracle = real_axis_zeros(media, te1, REGION.rectangle.re_min, REGION.rectangle.re_max)
    assert oracle
    for z in oracle:
        nearest = min(located.records, key=lambda r: abs(r.omega - z))
        assert abs(nearest.omega - z) <= 1e-8 * max(1.0, z)


def test_same_seed_same_records(media, te1, located):
    again = locate_zeros(media, te1, REGION, seed=7)
    assert [r.omega for r in again.records] == [r.omega for r in located.records]


def test_newton_from_nearby_start(media, te1):
    z0 = real_axis_zeros(media, te1, 0.1, 10.0)[0]
    root, residual, iterations = newton_refine(media, te1, z0 + 0.01 + 0.01j)
    assert abs(root - z0) <= 1e-10 * max(1.0, z0)
    assert residual <= settings.NEWTON_TOL
    assert iterations >= 1


def test_relative_residual_at_zero(media, te1):
    z0 = real_axis_zeros(media, te1, 0.1, 10.0)[0]
    assert relative_residual(media, te1, z0) <= 1e-8
    assert relative_residual(media, te1, z0 + 0.3j) > 1e-8


def test_moment_of_single_zero_leaf(media, te1):
    z0 = real_axis_zeros(media, te1, 0.1, 10.0)[0]
    leaf = Rectangle(re_min=z0 - 0.011, re_max=z0 + 0.013, im_min=-0.012, im_max=0.01)
    assert abs(contour_moment(media, te1, leaf, 1) - z0) <= 1e-3
    root, residual, _ = refine_leaf(media, te1, leaf, 1)
    assert abs(root - z0) <= 1e-10 * max(1.0, z0)


def test_jittered_count_keeps_clean_region(media, te1, rng):
    rect, count = jittered_count(media, te1, REGION, rng)
    assert rect == REGION.rectangle
    assert count >= 1


def test_jittered_count_moves_edge_off_zero(media, te1, rng):
    z0 = real_axis_zeros(media, te1, 0.1, 10.0)[0]
    region = SearchRegion.from_bounds(z0, z0 + 1.0, -1.0, 1.0)
    rect, _ = jittered_count(media, te1, region, rng)
    assert rect.re_min < z0


def test_failed_newton_leaf_is_quartered(media, te1, monkeypatch):
    z0 = real_axis_zeros(media, te1, 0.1, 10.0)[0]
    region = SearchRegion.from_bounds(z0 - 0.31, z0 + 0.17, -0.23, 0.29)
    real_refine = locate_module.refine_leaf
    calls = []

    def refine_failing_once(media_, mode_, rect, order):
        calls.append(rect)
        if len(calls) == 1:
            raise NewtonDivergence("forced failure", order=order)
        return real_refine(media_, mode_, rect, order)

    monkeypatch.setattr(locate_module, "refine_leaf", refine_failing_once)
    result = locate_zeros(media, te1, region, seed=3)

    assert result.count >= 1
    assert len(calls) >= 2
    assert result.complete
    assert any(abs(r.omega - z0) <= 1e-8 * max(1.0, z0) for r in result.records)


def test_unresolved_leaf_makes_result_incomplete(te1):
    record = EigenRecord.build(2.0 + 0j, te1, 1, 0.0)
    leaf = UnresolvedLeaf(
        mode=te1, center=3.0 + 0j, half_width=0.1, count=1, reason="newton_divergence"
    )
    result = LocateResult(
        mode=te1,
        count=2,
        records=[record],
        unresolved=[leaf],
        rectangle=Rectangle(re_min=1.0, re_max=4.0, im_min=-1.0, im_max=1.0),
    )
    assert result.consistent
    assert not result.complete


def test_duplicate_roots_reported_unresolved(te1):
    first = EigenRecord.build(2.0 + 0j, te1, 1, 0.0)
    twin = EigenRecord.build(2.0 + 1e-13j, te1, 1, 0.0)
    other = EigenRecord.build(3.0 + 0j, te1, 1, 0.0)
    kept, lost = _deduplicate([first, twin, other])
    assert [r.omega.real for r in kept] == [2.0, 3.0]
    assert len(lost) == 1
    assert lost[0].reason == DUPLICATE_ROOT
    assert lost[0].count == 1


@pytest.mark.slow
@pytest.mark.parametrize("mode", mode_list(1, 3), ids=str)
def test_wide_region_finds_every_zero(media, mode):
    region = SearchRegion.from_bounds(0.1, 10.0, -2.0, 2.0, radius=1.0)
    result = locate_zeros(media, mode, region, seed=0)

    assert result.complete, result.unresolved
    assert result.located_order == result.count
    real_roots = [r.omega for r in result.records if abs(r.omega.imag) <= 1e-8]
    for z in real_axis_zeros(media, mode, 0.1, 10.0):
        assert any(abs(w - z) <= 1e-8 * max(1.0, z) for w in real_roots), z
