import cmath
import math

import pytest

from telab.models.records import EigenRecord
from telab.models.spectral import SectorSpec, ray_point
from telab.services.spectra.audit import (
    EIGEN_HEADER,
    counting_from_partial,
    eigen_rows,
    missing_partners,
    orbit,
    schatten_partial_sum,
    schatten_tail_check,
    schatten_tail_sweep,
    sector_audit,
)


def record(omega, mode, order=1):
    return EigenRecord.build(complex(omega), mode, order, 0.0)


def test_sector_audit_flags_diagonal_eigenvalue(te1):
    records = [record(ray_point(3.0, 45.0), te1), record(ray_point(1.0, 45.0), te1), record(3.0, te1)]
    audit = sector_audit(records, SectorSpec(gamma=1.0 - 1e-9, omega0=2.0))
    assert audit.ratios[0] == pytest.approx(1.0)
    assert audit.ratios[2] == 0.0
    assert [r.omega for r in audit.violations] == [records[0].omega]
    assert audit.row().violations == 1


@pytest.mark.parametrize("t, flagged", [(2.9, True), (3.1, False)])
def test_sector_threshold_on_magnitude(te1, t, flagged):
    records = [record(ray_point(3.0, 60.0), te1)]
    audit = sector_audit(records, SectorSpec(gamma=0.5, omega0=t))
    assert bool(audit.violations) is flagged


def test_partial_sum_of_one_record(te1):
    k = ray_point(10.0, 45.0)
    omega = 2.0 + 0.5j
    expected = 3 / abs(1j * omega - k) ** 4
    assert schatten_partial_sum([record(omega, te1)], k) == pytest.approx(expected)


def test_counting_bounded_by_partial_sum(te1, tm1):
    records = [record(w, m) for w in (1.0, -1.0, 2.5 + 0.3j, 7.0) for m in (te1, tm1)]
    k = ray_point(3.0, 45.0)
    count, bound = counting_from_partial(records, k)
    assert count == 4 * 3 + 2 * 3
    assert count <= bound


def test_tail_check_without_records():
    assert schatten_tail_check([], 10j) == (0.0, 0.0)


def test_tail_check_needs_media(te1):
    with pytest.raises(ValueError):
        schatten_tail_check([record(1.0, te1)], ray_point(10.0, 45.0))


def test_tail_check_against_operator_bound(media, te1, grid):
    k = ray_point(10.0, 45.0)
    records = [record(w, te1) for w in (1.7, -1.7)]
    partial, bound = schatten_tail_check(records, k, media=media, grid=grid)
    assert partial == pytest.approx(schatten_partial_sum(records, k))
    assert bound > 0


def test_tail_sweep_decays(te1):
    records = [record(w, te1) for w in (1.0, -1.0, 2.0 + 1j, -2.0 - 1j)]
    sums, slope = schatten_tail_sweep(records, 45.0, [10.0, 20.0, 40.0, 80.0])
    assert all(b < a for a, b in zip(sums, sums[1:]))
    assert slope == pytest.approx(-4.0, abs=0.2)


def test_tail_sweep_without_records():
    sums, slope = schatten_tail_sweep([], 45.0, [10.0, 20.0])
    assert sums == [0.0, 0.0]
    assert slope is None


def test_orbit():
    assert orbit(1 + 2j) == [1 + 2j, -1 - 2j, 1 - 2j, -1 + 2j]


def test_missing_partners(te1):
    w = 2.0 + 0.5j
    full = [record(p, te1) for p in orbit(w)]
    assert missing_partners(full) == []
    lonely = missing_partners([record(w, te1)])
    assert len(lonely) == 3
    assert {p for _, p in lonely} == set(orbit(w)[1:])


def test_partners_must_share_order(te1):
    records = [record(2.0, te1), record(-2.0, te1, order=2)]
    # real zeros: -omega and -conj(omega) coincide, conj(omega) is the record itself
    assert len(missing_partners(records)) == 4


def test_eigen_rows_sorted(te1, tm1):
    rows = eigen_rows([record(5.0, tm1), record(3.0, te1), record(-1.0, te1)])
    assert all(len(row) == len(EIGEN_HEADER) for row in rows)
    assert [(row[1], row[2]) for row in rows] == [("TE", -1.0), ("TE", 3.0), ("TM", 5.0)]
    assert rows[0][-1] == 0.0


def test_ratio_column_uses_sector_ratio(te1):
    row = eigen_rows([record(cmath.rect(2.0, math.pi / 6), te1)])[0]
    assert row[-1] == pytest.approx(math.sin(math.pi / 3))
