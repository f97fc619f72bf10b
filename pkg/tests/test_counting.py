import pytest

from telab.errors import TruncationSuspect
from telab.models.records import EigenRecord
from telab.models.spectral import SectorSpec
from telab.services.dispersion import real_axis_zeros
from telab.services.spectra.counting import (
    QuadrantTask,
    complete_orbits,
    count_on_grid,
    counting_function,
    counting_rows,
    n_max_for,
    quadrant_region,
    t_grid_for,
)


def record(omega, mode):
    return EigenRecord.build(complex(omega), mode, 1, 0.0)


def test_n_max_for(media):
    # ceil(1.3 * 5 * sqrt(8)) + 5
    assert n_max_for(media, 5.0, 1.3) == 24


def test_t_grid():
    assert t_grid_for(4.0, 4) == [1.0, 2.0, 3.0, 4.0]


def test_complete_orbits(te1):
    records = complete_orbits([record(2 + 1j, te1), record(3.0, te1), record(-1.0 + 0.5j, te1)])
    omegas = sorted((r.omega for r in records), key=lambda w: (w.real, w.imag))
    assert omegas == [-3.0, -2 - 1j, -2 + 1j, 2 - 1j, 2 + 1j, 3.0]


def test_orbit_of_imaginary_zero(te1):
    records = complete_orbits([record(2j, te1)])
    assert sorted(r.omega.imag for r in records) == [-2.0, 2.0]


def test_count_on_grid(te1, tm1):
    records = [record(1.0, te1), record(-1.0, te1), record(2.5j, tm1)]
    assert count_on_grid(records, [0.5, 1.0, 2.0, 3.0]) == [0, 6, 6, 9]
    assert count_on_grid([], [1.0, 2.0]) == [0, 0]


def test_quadrant_region_is_seeded(media, te1):
    task = QuadrantTask(media=media, mode=te1, t_max=3.0, seed=5)
    a = quadrant_region(task).rectangle
    b = quadrant_region(task).rectangle
    assert a == b
    assert a.re_min < 0 < a.re_max
    assert 0.05 <= -a.re_min <= 0.055


async def test_rejects_non_positive_t_max(media):
    with pytest.raises(ValueError):
        await counting_function(media, 0.0)


async def test_quick_counting_run(media):
    run = await counting_function(media, 1.0, t_points=4)
    assert len(run.report.counts) == 4
    assert run.report.bound_holds()
    assert all(abs(r.omega) <= 1.0 for r in run.records)
    assert sum(r.multiplicity for r in run.records) == run.report.counts[-1]


@pytest.mark.slow
async def test_counting_run_finds_real_zeros(media, te1):
    run = await counting_function(
        media, 3.0, t_points=6, sectors=[SectorSpec(gamma=0.5, omega0=1.0)]
    )
    report = run.report
    assert report.t_grid == t_grid_for(3.0, 6)
    assert report.truncation_degree >= n_max_for(media, 3.0, 1.3)
    assert report.bound_holds()
    assert report.unresolved == 0
    assert counting_rows(report)[-1] == (3.0, report.counts[-1])
    assert all(abs(r.omega) <= 3.0 for r in run.records)

    oracle = real_axis_zeros(media, te1, 0.1, 3.0)
    te1_real = [r.omega.real for r in run.records if r.mode == te1 and abs(r.omega.imag) <= 1e-10]
    for z in oracle:
        assert min(abs(w - z) for w in te1_real) <= 1e-8 * max(1.0, z)
        assert min(abs(w + z) for w in te1_real) <= 1e-8 * max(1.0, z)


def test_truncation_error_carries_details():
    err = TruncationSuspect("still zeros", n_max=10, t_max=3.0, retries=2)
    assert err.to_dict()["details"]["retries"] == 2
    assert err.exit_code == 3
