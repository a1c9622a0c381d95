"""Tests for the finite-difference operators, eigensolvers and verification reports."""
import math

import numpy as np
import pytest

import pdm_spectra.oracle as oracle
from pdm_spectra.const import (
    CONJUGATION_TOL,
    CONVERGENCE_BAND,
    RESIDUAL_RELATIVE_TOL,
    SAMSONOV_GAP_VALUE,
)
from pdm_spectra.model import AxialModel, FormulaVariant, ModelParameterError, RadialModel
from pdm_spectra.oracle import (
    ComplexOperatorError,
    Discretization,
    DomainMismatch,
    NonConvergence,
    TridiagonalOperator,
    conjugation_mismatch,
    convergence_ratio,
    default_axial_grid,
    discretize_axial,
    discretize_radial,
    eig_complex,
    eig_sym_tridiag,
    eigen_residual,
    gershgorin_discs,
    gershgorin_scale,
    richardson_limit,
    sturm_count,
    verify_axial,
    verify_radial,
)


def _random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    return TridiagonalOperator(rng.normal(size=n), rng.normal(size=n - 1))


@pytest.fixture(scope="module")
def scarf_operator():
    return discretize_axial(AxialModel.scarf2(3.0), Discretization(-20.0, 20.0, 2000))


@pytest.fixture(scope="module")
def scarf_spectrum(scarf_operator):
    return eig_complex(scarf_operator, scarf_operator.n)


def test_discretization():
    disc = Discretization(0.0, 1.0, 99)
    assert disc.h == pytest.approx(0.01)
    assert len(disc.nodes) == 99
    assert disc.nodes[0] == pytest.approx(0.01)
    assert disc.nodes[-1] == pytest.approx(0.99)
    assert disc.refine().n_points == 199
    assert disc.refine().h == pytest.approx(disc.h / 2)


def test_discretization_rejects_small_or_empty_grids():
    with pytest.raises(ModelParameterError):
        Discretization(0.0, 1.0, 8)
    with pytest.raises(ModelParameterError):
        Discretization(1.0, 1.0, 100)


def test_discretize_radial_coulomb_has_no_centrifugal_term():
    disc = Discretization(1e-3, 400.0, 8000)
    op = discretize_radial(RadialModel.coulomb(), 0.5, disc)
    np.testing.assert_allclose(op.diagonal, 2.0 / disc.h**2 - 2.0 / disc.nodes)
    assert op.is_real_symmetric


def test_discretize_radial_oscillator():
    disc = Discretization(1e-3, 20.0, 4000)
    op = discretize_radial(RadialModel.oscillator(1.0), 1.0, disc)
    rho = disc.nodes
    np.testing.assert_allclose(op.diagonal, 2.0 / disc.h**2 + 0.75 / rho**2 + rho**2 / 4.0)
    np.testing.assert_allclose(op.off_diagonal, -1.0 / disc.h**2)


def test_discretize_radial_rejects_origin_and_complex_ell():
    with pytest.raises(DomainMismatch):
        discretize_radial(RadialModel.coulomb(), 0.5, Discretization(0.0, 10.0, 100))
    with pytest.raises(ModelParameterError):
        discretize_radial(RadialModel.coulomb(), 1j, Discretization(0.1, 10.0, 100))


def test_discretize_axial_scarf_is_pt_symmetric(scarf_operator):
    assert not scarf_operator.is_real_symmetric
    imaginary = np.imag(scarf_operator.diagonal)
    np.testing.assert_allclose(imaginary, -imaginary[::-1], atol=1e-12)

    centred = discretize_axial(AxialModel.scarf2(3.0), Discretization(-20.0, 20.0, 2001))
    assert abs(np.imag(centred.diagonal[1000])) < 1e-12


def test_discretize_axial_samsonov_domain():
    model = AxialModel.samsonov()
    disc = default_axial_grid(model)
    assert (disc.x_min, disc.x_max) == (-math.pi, math.pi)
    assert discretize_axial(model, disc).n == disc.n_points
    with pytest.raises(DomainMismatch):
        discretize_axial(model, Discretization(-3.0, 3.0, 100))


def test_eig_sym_tridiag_diagonal():
    op = TridiagonalOperator(np.array([3.0, 1.0, 2.0]), np.zeros(2))
    np.testing.assert_allclose(eig_sym_tridiag(op, 2), [1.0, 2.0])
    np.testing.assert_allclose(eig_sym_tridiag(op, 3), [1.0, 2.0, 3.0])


def test_eig_sym_tridiag_free_laplacian():
    op = discretize_axial(AxialModel.well(math.pi), Discretization(0.0, math.pi, 1999))
    assert abs(eig_sym_tridiag(op, 1)[0] - 1.0) <= 1e-5


def test_eig_sym_tridiag_rejects_bad_requests(scarf_operator):
    op = _random_symmetric(20, 1)
    with pytest.raises(ModelParameterError):
        eig_sym_tridiag(op, 0)
    with pytest.raises(ModelParameterError):
        eig_sym_tridiag(op, 21)
    with pytest.raises(ComplexOperatorError):
        eig_sym_tridiag(scarf_operator, 2)


def test_eig_complex_two_by_two():
    op = TridiagonalOperator(np.array([1.0, 1.0], dtype=complex), np.array([1j]))
    values = sorted(eig_complex(op, 2), key=lambda value: value.imag)
    np.testing.assert_allclose(values, [1 - 1j, 1 + 1j], atol=1e-12)


def test_eig_complex_matches_symmetric_solver():
    op = _random_symmetric(50, 3)
    values = eig_complex(op, 50)
    np.testing.assert_allclose(values.real, eig_sym_tridiag(op, 50), atol=1e-8)
    assert np.max(np.abs(values.imag)) < 1e-8


def test_eig_complex_dense_limit():
    op = TridiagonalOperator(np.zeros(4001, dtype=complex), np.zeros(4000))
    with pytest.raises(ModelParameterError):
        eig_complex(op, 1)


def test_eig_complex_vectors_are_eigenvectors():
    op = discretize_axial(AxialModel.scarf2(5.0), Discretization(-20.0, 20.0, 400))
    values, vectors = eig_complex(op, 2, vectors=True)
    scale = gershgorin_scale(op)
    for index, value in enumerate(values):
        assert eigen_residual(op, value, vectors[:, index]) <= RESIDUAL_RELATIVE_TOL * scale


def test_sturm_count_matches_spectrum():
    op = _random_symmetric(60, 5)
    values = eig_sym_tridiag(op, 60)
    rng = np.random.default_rng(11)
    shifts = rng.uniform(values[0] - 1.0, values[-1] + 1.0, size=100)
    counts = sturm_count(op, shifts)
    expected = [int(np.sum(values < shift)) for shift in shifts]
    assert list(counts) == expected
    assert sturm_count(op, values[-1] + 10.0) == 60


def test_gershgorin_containment(scarf_operator, scarf_spectrum):
    centres, radii = gershgorin_discs(scarf_operator)
    for value in scarf_spectrum:
        assert np.any(np.abs(value - centres) <= radii + 1e-9)


def test_scarf_spectrum_closed_under_conjugation(scarf_spectrum):
    mismatch = conjugation_mismatch(scarf_spectrum)
    assert np.max(mismatch[:20]) <= CONJUGATION_TOL
    assert np.all(mismatch <= CONJUGATION_TOL * np.maximum(1.0, np.abs(scarf_spectrum)))


@pytest.mark.parametrize(
    "model, variant, absolute",
    [
        (AxialModel.scarf2(5.0), FormulaVariant.PAPER, True),
        (AxialModel.samsonov(), FormulaVariant.PAPER, True),
        (AxialModel.samsonov(), FormulaVariant.STANDARD, False),
    ],
)
def test_pt_symmetric_spectra_closed_under_conjugation(model, variant, absolute):
    op = discretize_axial(model, default_axial_grid(model), variant)
    values = eig_complex(op, op.n)
    mismatch = conjugation_mismatch(values)
    assert len(mismatch) == op.n
    if absolute:
        assert np.max(mismatch) <= CONJUGATION_TOL
    assert np.all(mismatch <= CONJUGATION_TOL * np.maximum(1.0, np.abs(values)))


def test_conjugation_mismatch():
    np.testing.assert_allclose(conjugation_mismatch([1 + 1j, 1 - 1j, 2.0]), 0.0)
    assert conjugation_mismatch([1 + 1j, 1 - 0.5j])[0] == pytest.approx(0.5)


def test_convergence_helpers():
    c = 0.3
    assert convergence_ratio([1 + 4 * c], [1 + c], [1 + c / 4])[0] == pytest.approx(4.0)
    assert richardson_limit([1 + 4 * c], [1 + c])[0] == pytest.approx(1.0)


@pytest.mark.parametrize(
    "model, disc, count",
    [
        (AxialModel.well(math.pi), Discretization(0.0, math.pi, 63), 3),
        (AxialModel.morse(25.0, 1.0), Discretization(-3.0, 30.0, 1023), 3),
    ],
)
def test_richardson_error_drops_fourfold_per_halving(model, disc, count):
    grids = [disc, disc.refine(), disc.refine().refine()]
    levels = [
        eig_sym_tridiag(discretize_axial(model, d, FormulaVariant.STANDARD), count) for d in grids
    ]
    limit = richardson_limit(levels[1], levels[2])
    errors = [np.abs(level - limit) for level in levels[:2]]
    assert np.all(errors[1] > 0.0)
    assert np.all((errors[0] / errors[1] >= 3.5) & (errors[0] / errors[1] <= 4.5))


def test_verify_axial_well():
    report = verify_axial(AxialModel.well(math.pi), 3)
    assert report.passed
    np.testing.assert_allclose(report.matched(), [1.0, 4.0, 9.0], rtol=1e-4)
    low, high = CONVERGENCE_BAND
    assert all(low <= ratio <= high for ratio in report.convergence)


def test_verify_axial_morse_variants():
    model = AxialModel.morse(25.0, 1.0)
    paper = verify_axial(model, 3)
    assert not paper.passed
    assert not paper.variant_passes(FormulaVariant.PAPER)

    standard = verify_axial(model, 3, variant=FormulaVariant.STANDARD)
    assert standard.passed
    np.testing.assert_allclose(standard.matched(), [-20.25, -12.25, -6.25], rtol=1e-3)


def test_verify_axial_scarf():
    report = verify_axial(AxialModel.scarf2(5.0), 2)
    assert report.passed
    matched = report.matched()
    np.testing.assert_allclose(np.real(matched), [-4.0, -1.0], atol=1e-2)
    assert np.max(np.abs(np.imag(matched))) < 1e-6
    assert any(abs(value + 0.25) < 1e-2 for value in report.unmatched)
    assert report.details["complex_pairs"] == []


def test_verify_axial_samsonov_standard():
    report = verify_axial(AxialModel.samsonov(), 4, variant=FormulaVariant.STANDARD)
    assert report.labels == [1, 3, 4, 5]
    assert report.passed
    np.testing.assert_allclose(np.real(report.matched()), [0.25, 2.25, 4.0, 6.25], atol=1e-2)
    assert report.neighbourhood == []
    assert all(abs(value - SAMSONOV_GAP_VALUE) > 0.5 for value in report.spectrum)
    assert [pair["n_z"] for pair in report.details["complex_pairs"]] == [4]
    assert any("n_z=4" in warning for warning in report.warnings)
    assert report.details["conjugation_mismatch"] <= CONJUGATION_TOL


def test_verify_axial_reports_failed_complex_qr(monkeypatch):
    def failing_eigvals(*args, **kwargs):
        raise np.linalg.LinAlgError("QR iteration did not converge")

    monkeypatch.setattr(oracle, "eigvals", failing_eigvals)
    op = discretize_axial(AxialModel.scarf2(5.0), Discretization(-20.0, 20.0, 100))
    with pytest.raises(NonConvergence) as excinfo:
        eig_complex(op, 2)
    assert str(excinfo.value) == "QR iteration did not converge"

    report = verify_axial(AxialModel.scarf2(5.0), 2, Discretization(-20.0, 20.0, 100))
    assert report.spectrum == []
    assert not report.passed
    assert any("did not converge" in warning for warning in report.warnings)
    assert not any("http" in warning for warning in report.warnings)


def test_verify_axial_rejects_wrong_domain():
    with pytest.raises(DomainMismatch):
        verify_axial(AxialModel.samsonov(), 2, Discretization(-2.0, 2.0, 200))


def test_verify_radial_coulomb():
    report = verify_radial(RadialModel.coulomb(), 0.5, 3, variant=FormulaVariant.STANDARD)
    assert report.passed
    assert report.matched()[0] == pytest.approx(-1.0, rel=1e-3)
    assert not report.variant_passes(FormulaVariant.PAPER)
    assert len(report.convergence) == 3
    assert report.convergence_band == CONVERGENCE_BAND
    low, high = CONVERGENCE_BAND
    assert all(low <= ratio <= high for ratio in report.convergence)
    assert report.details["richardson"][0] == pytest.approx(-1.0, rel=1e-3)


def test_verify_radial_oscillator():
    report = verify_radial(RadialModel.oscillator(1.0), 1.0, 3)
    assert report.passed
    np.testing.assert_allclose(report.matched(), [2.0, 4.0, 6.0], rtol=1e-3)
    low, high = CONVERGENCE_BAND
    assert all(low <= ratio <= high for ratio in report.convergence)


def test_verify_radial_leaves_small_ell_unjudged():
    report = verify_radial(RadialModel.coulomb(), 0.25, 2, variant=FormulaVariant.STANDARD)
    assert report.convergence_band is None
    assert len(report.convergence) == 2
