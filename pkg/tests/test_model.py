"""Tests for the ordering algebra, mass profile and model catalogs."""
import cmath
import math

import numpy as np
import pytest

from pdm_spectra.model import (
    AmbiguityOrdering,
    AxialModel,
    FormulaVariant,
    InvalidOrdering,
    MassProfile,
    ModelParameterError,
    RadialModel,
    SeparationConstants,
    ell_from_kphi2,
    kphi2_from_energy,
    ordering_by_name,
    ordering_shift,
    preset_orderings,
    zeta,
)

EXPECTED_ZETA = {
    "Gora–Williams": 2.0,
    "BenDaniel–Duke": 0.0,
    "Zhu–Kroemer": 1.5,
    "Li–Kuhn": 1.0,
    "Mustafa–Mazharimousavi": 0.875,
}


def test_preset_zeta_values():
    presets = preset_orderings()
    assert [name for name, _ in presets] == list(EXPECTED_ZETA)
    for name, ordering in presets:
        assert abs(zeta(ordering) - EXPECTED_ZETA[name]) <= 1e-12


def test_ordering_shift_is_zeta_minus_beta():
    ordering = ordering_by_name("bendaniel-duke")
    assert ordering_shift(ordering) == 1.0
    assert ordering.shift == ordering.zeta - ordering.beta


def test_von_roos_constraint_rejected():
    with pytest.raises(InvalidOrdering):
        AmbiguityOrdering(0.0, 0.0, 0.0)


def test_from_triple():
    assert AmbiguityOrdering.from_triple("-0.5, 0, -0.5") == ordering_by_name("zhu-kroemer")
    with pytest.raises(InvalidOrdering):
        AmbiguityOrdering.from_triple("1,2")
    with pytest.raises(InvalidOrdering):
        AmbiguityOrdering.from_triple("a,b,c")


@pytest.mark.parametrize(
    "name", ["BenDaniel-Duke", "bendaniel_duke", "BENDANIEL–DUKE", "bendaniel duke"]
)
def test_ordering_by_name_ignores_case_and_dashes(name):
    assert ordering_by_name(name) == AmbiguityOrdering(0.0, -1.0, 0.0)


def test_unknown_ordering_name():
    with pytest.raises(InvalidOrdering, match="Unknown ordering"):
        ordering_by_name("nobody")


def test_swapped_keeps_zeta():
    rng = np.random.default_rng(7)
    for _ in range(50):
        alpha, beta = rng.uniform(-2, 2, size=2)
        ordering = AmbiguityOrdering(alpha, beta, -1.0 - alpha - beta)
        assert abs(ordering.swapped().zeta - ordering.zeta) <= 1e-12


def test_heterojunction_continuity():
    assert ordering_by_name("zhu-kroemer").satisfies_heterojunction_continuity
    assert ordering_by_name("bendaniel-duke").satisfies_heterojunction_continuity
    assert not ordering_by_name("gora-williams").satisfies_heterojunction_continuity


def test_kphi2_and_ell():
    ordering = ordering_by_name("bendaniel-duke")
    kphi2 = kphi2_from_energy(0.375, 0, ordering)
    assert kphi2 == 0.75
    assert ell_from_kphi2(kphi2) == 0.5

    ell = ell_from_kphi2(5.0)
    assert ell.real == 0.0 and ell.imag == pytest.approx(2.0)


def test_separation_constants_from_energy():
    ordering = ordering_by_name("li-kuhn")
    constants = SeparationConstants.from_energy(1.25, 2, 1.0, ordering)
    assert constants.kphi2 == pytest.approx(2 * 1.25 + 2 * (ordering.shift - 1) - 4)
    assert constants.ell * constants.ell == pytest.approx(1 - constants.kphi2)
    assert constants.kz2 == 1.0


def test_canonical_mass_derivatives():
    mass = MassProfile.canonical()
    g1, g2 = mass.rho_log_derivatives(2.0)
    assert g1 == pytest.approx(-1.0)
    assert g2 == pytest.approx(1.5)
    assert mass.evaluate(2.0) == pytest.approx(0.25)


def test_numeric_mass_derivatives_match_closed_form():
    mass = MassProfile(g=lambda rho: np.asarray(rho, dtype=float) ** -2)
    rho = np.array([0.5, 1.0, 3.0])
    g1, g2 = mass.rho_log_derivatives(rho)
    np.testing.assert_allclose(g1, -2.0 / rho, rtol=1e-6)
    np.testing.assert_allclose(g2, 6.0 / rho**2, rtol=1e-4)


def test_radial_models():
    assert RadialModel.coulomb().potential(2.0) == -1.0
    assert RadialModel.oscillator(2.0).potential(1.0) == 1.0
    with pytest.raises(ModelParameterError):
        RadialModel.oscillator(0.0)
    with pytest.raises(ModelParameterError):
        RadialModel("coulomb", a=1.0)


def test_axial_model_validation():
    with pytest.raises(ModelParameterError):
        AxialModel.well(-1.0)
    with pytest.raises(ModelParameterError):
        AxialModel("morse", D=1.0)
    with pytest.raises(ModelParameterError):
        AxialModel("samsonov", L=1.0)
    with pytest.raises(ModelParameterError):
        AxialModel("delta")


def test_axial_potentials():
    scarf = AxialModel.scarf2(3.0)
    assert scarf.potential(0.0) == pytest.approx(-3.0)
    z = np.linspace(-2, 2, 9)
    values = scarf.potential(z)
    np.testing.assert_allclose(values[::-1], np.conj(values), atol=1e-14)

    samsonov = AxialModel.samsonov()
    assert samsonov.potential(0.0) == -1.0
    assert samsonov.potential(0.0, FormulaVariant.STANDARD) == -6.0
    assert samsonov.domain == (-math.pi, math.pi)

    well = AxialModel.well(2.0)
    assert well.potential(1.0) == 0.0
    assert math.isinf(well.potential(3.0))


def test_describe():
    assert AxialModel.morse(25.0, 1.0).describe() == {"kind": "morse", "D": 25.0, "eps": 1.0}
    assert RadialModel.oscillator(1.0).describe() == {"kind": "oscillator", "a": 1.0}
    assert ordering_by_name("bendaniel-duke").as_dict() == {
        "alpha": 0.0,
        "beta": -1.0,
        "gamma": 0.0,
        "zeta": 0.0,
    }
    assert cmath.isclose(ell_from_kphi2(complex(1.0, 0.0)), 0.0)
