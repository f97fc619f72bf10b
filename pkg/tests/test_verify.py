import math

import pytest

from telab.errors import CheckFailed, IllConditionedSolve
from telab.handlers.verify import (
    TOLERANCES,
    CheckResult,
    ModeTask,
    _check,
    _guard,
    impedance_degeneracy_check,
    spectra_region,
    symmetric_region,
    verify_mode_task,
)
from telab.models.media import MediaConfig


def test_check_records_tolerance(te1):
    result = _check("square_spectrum", te1, True, 1e-9, extra=1)
    assert result.status == "pass"
    assert result.mode == "TE1"
    assert result.tolerance == TOLERANCES["square_spectrum"]
    assert result.details == {"extra": 1}
    assert not result.failed


def test_guard_turns_error_into_failed_check(te1):
    def boom():
        raise IllConditionedSolve("too large", condition=1e20)

    [result] = _guard("injectivity", te1, boom)
    assert result.failed
    assert result.details["error"]["error"] == "ill_conditioned_solve"


def test_guard_lets_other_errors_through(te1):
    def broken():
        raise KeyError("x")

    with pytest.raises(KeyError):
        _guard("injectivity", te1, broken)


def test_impedance_check_passes_for_reference_media(media):
    result = impedance_degeneracy_check(media)
    assert result.status == "pass"
    assert result.details["equal_impedances"] is False
    assert result.value == pytest.approx(result.details["impedance_contrast"], rel=0.2)


def test_impedance_check_flags_equal_impedances():
    result = impedance_degeneracy_check(MediaConfig.unchecked(1.0, 1.0, 2.0, 2.0))
    assert result.failed
    assert result.details["equal_impedances"] is True
    assert result.details["impedance_contrast"] == 0.0


def test_regions_scale_with_radius():
    media = MediaConfig.unchecked(1.0, 1.0, 4.0, 2.0, 2.0)
    rect = spectra_region(media).rectangle
    assert (rect.re_min, rect.re_max) == (0.05, 5.0)
    mirror = symmetric_region(media).rectangle
    assert mirror.re_min == -mirror.re_max
    assert mirror.contains(0j)


def test_check_failed_exit_code():
    err = CheckFailed("1 check failed", failed=["square_spectrum"])
    assert err.exit_code == 1


def test_mode_task_on_small_grid(media, te1, spectral):
    task = ModeTask(
        media=media,
        mode=te1,
        spectral=spectral,
        grid_size=32,
        seed=1,
        k_magnitudes=[10.0, 20.0],
        probe_radii=[10.0, 20.0],
    )
    tables = verify_mode_task(task)
    names = {c.name for c in tables.checks}
    assert {"resolvent_identity", "injectivity", "schatten_four", "square_spectrum"} <= names
    block = {"resolvent_identity", "injectivity", "schatten_four", "eigen_map"}
    assert not [c.name for c in tables.checks if c.failed and c.name in block]
    assert [c.status for c in tables.checks if c.name == "k_independence"] == ["info"]
    assert all(math.isfinite(row[1]) for row in tables.growth_rows)
    assert len(tables.scaling_rows) == 2


def test_check_result_statuses():
    with pytest.raises(ValueError):
        CheckResult(name="x", status="unknown")
