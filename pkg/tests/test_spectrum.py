import numpy as np
import pytest

from telab.models.mode import ModeId, Polarization
from telab.models.spectral import validate_k
from telab.services.dispersion import real_axis_zeros
from telab.services.modeop.grid import build_grid
from telab.services.modeop.norms import vector_norm
from telab.services.modeop.operator import build_mode_operator
from telab.services.modeop.spectrum import (
    ExpansionTable,
    algebraic_multiplicities,
    chain_defect,
    confirmed_frequencies,
    eigs_to_frequencies,
    expansion_residual,
    generalized_eigenbasis,
    k_independence_check,
    match_frequencies,
    mu_to_omega,
    omega_to_mu,
    random_admissible_shifts,
    smooth_target,
    square_spectrum_check,
)


@pytest.fixture(scope="module")
def basis(te1_operator):
    return generalized_eigenbasis(te1_operator)


@pytest.fixture(scope="module")
def fine_operator(media, te1, spectral):
    return build_mode_operator(media, te1, spectral, build_grid(1.0, 48))


def test_frequency_map_inverts(spectral):
    omega = 3.2 - 0.4j
    assert mu_to_omega(omega_to_mu(omega, spectral.k), spectral.k) == pytest.approx(omega)


def test_spectrum_partitions_eigenvalues(te1_operator):
    spectrum = eigs_to_frequencies(te1_operator)
    total = len(spectrum.pairs) + len(spectrum.static) + len(spectrum.unresolved)
    assert total == te1_operator.size
    magnitudes = [abs(w) for w in spectrum.frequencies]
    assert magnitudes == sorted(magnitudes)


def test_confirmed_frequencies_cover_real_zeros(media, te1, fine_operator):
    confirmed = confirmed_frequencies(fine_operator, eigs_to_frequencies(fine_operator), 10.0)
    zeros = real_axis_zeros(media, te1, 0.1, 6.0)
    assert zeros
    for z in zeros:
        assert min(abs(w - z) for w in confirmed) <= 1e-6 * max(1.0, z)


def test_confirmed_frequencies_come_in_pairs(fine_operator):
    confirmed = confirmed_frequencies(fine_operator, eigs_to_frequencies(fine_operator), 6.0)
    for w in confirmed:
        # real pencil: omega and -conj(omega) together
        assert min(abs(v + w.conjugate()) for v in confirmed) <= 1e-6 * max(1.0, abs(w))


def test_basis_spans_coordinates(te1_operator, basis):
    assert basis.size == te1_operator.size
    assert np.all(basis.heights >= 1)
    magnitudes = np.abs(basis.eigenvalues)
    assert np.all(magnitudes[:-1] >= magnitudes[1:])


def test_basis_vectors_have_unit_weighted_norm(te1_operator, basis):
    for j in range(0, basis.size, 17):
        assert vector_norm(te1_operator, basis.vectors[:, j]) == pytest.approx(1.0)


def test_chain_defects_small(te1_operator, basis):
    defects = [chain_defect(te1_operator, basis, j) for j in range(basis.size)]
    assert max(defects) <= 1e-6


def test_expansion_residual_shape(te1_operator, basis, rng):
    target = smooth_target(te1_operator, rng)
    n = te1_operator.size
    table = expansion_residual(te1_operator, target, [1, 8, 32, n // 2, n], basis)
    assert table.target_norm == pytest.approx(1.0)
    assert table.residuals[-1] == 0.0
    assert all(b <= a for a, b in zip(table.residuals, table.residuals[1:]))
    assert table.first_below(1e-3) is not None
    assert table.first_below(1e-3) <= n // 2


def test_expansion_of_leading_vector(te1_operator, basis):
    target = basis.vectors[:, 0]
    table = expansion_residual(te1_operator, target, [0, 1], basis)
    assert table.residuals[0] == pytest.approx(table.target_norm)
    assert table.residuals[1] <= 1e-10 * table.target_norm


def test_first_below():
    table = ExpansionTable(m_values=[1, 2, 4], residuals=[0.5, 1e-4, 0.0], target_norm=1.0)
    assert table.first_below(1e-3) == 2
    assert table.first_below(0.0) == 4
    assert ExpansionTable(m_values=[1], residuals=[0.5], target_norm=1.0).first_below(0.1) is None


def test_square_spectrum(te1_operator):
    assert square_spectrum_check(te1_operator) <= 1e-6


def test_match_frequencies():
    pairs, only_a, only_b = match_frequencies([1.0, 2.0 + 1j, 5.0], [2.0 + 1j + 1e-9, 1.0, 7.0], 1e-6)
    assert pairs == [(1.0, 1.0), (2.0 + 1j, 2.0 + 1j + 1e-9)]
    assert only_a == [5.0]
    assert only_b == [7.0]


def test_algebraic_multiplicities():
    values = [1.0, 1.0 + 1e-9, 2.0, 3.0]
    assert algebraic_multiplicities(values, [1.0, 2.0, 4.0], 1e-6) == [2, 1, 0]


def test_admissible_shifts_stay_in_sector(te1_operator, rng):
    shifts = random_admissible_shifts(te1_operator, rng, count=5)
    assert len(shifts) == 5
    for s in shifts:
        assert abs(s) <= 0.5 * abs(te1_operator.k)
        validate_k(te1_operator.k + s, 1.0)


def test_admissible_shifts_are_seeded(te1_operator):
    a = random_admissible_shifts(te1_operator, np.random.default_rng(3))
    b = random_admissible_shifts(te1_operator, np.random.default_rng(3))
    assert a == b


@pytest.mark.slow
def test_spectrum_independent_of_k(media, te1, spectral):
    other = validate_k(2.0 * spectral.k, 1.0)
    report = k_independence_check(media, te1, spectral, other, 64)
    assert report.matched > 0
    assert report.max_deviation <= 1e-4


@pytest.mark.slow
@pytest.mark.parametrize("polarization", ["TE", "TM"])
def test_smooth_targets_converge_before_half_basis(media, spectral, polarization):
    mode = ModeId(degree=1, polarization=Polarization(polarization))
    op = build_mode_operator(media, mode, spectral, build_grid(1.0, 64))
    basis = generalized_eigenbasis(op)
    n = basis.size
    rng = np.random.default_rng(11)
    for _ in range(10):
        table = expansion_residual(op, smooth_target(op, rng), list(range(1, n + 1)), basis)
        first = table.first_below(1e-3)
        assert first is not None
        assert first < n / 2
