"""composite.py: Full PDM Hamiltonian on a (rho, z) grid and eigen-residual checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .const import _LOGGER, COMPOSITE_CONVERGENCE_BAND, FLAG_NONNORMALIZABLE_SUSPECT
from .model import (
    AmbiguityOrdering,
    AxialModel,
    FormulaVariant,
    MassProfile,
    ModelParameterError,
    PdmSpectraError,
    QuantumNumbers,
    RadialModel,
)
from .oracle import (
    Discretization,
    VerificationReport,
    default_axial_grid,
    discretize_axial,
    discretize_radial,
    eig_complex,
    eig_sym_tridiag,
    inverse_iteration,
    load_grids,
)
from .spectra import energy_coulomb, energy_oscillator, kz2_axial


class Assembly(str, Enum):
    CANONICAL = "canonical"
    AS_PRINTED = "as-printed"


@dataclass(frozen=True)
class CompositePotential:
    """V(rho, z) built from a radial and an axial model; the azimuthal part is zero."""

    radial: RadialModel
    axial: AxialModel
    assembly: Assembly = Assembly.CANONICAL
    variant: FormulaVariant = FormulaVariant.PAPER


@dataclass
class GridField:
    """Psi(rho_i, z_j) for one azimuthal mode exp(i m phi), sampled at phi."""

    rho_disc: Discretization
    z_disc: Discretization
    values: np.ndarray
    m: int
    phi: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values)
        _check_shape(self.values, self.rho_disc, self.z_disc)

    def with_values(self, values) -> GridField:
        return GridField(self.rho_disc, self.z_disc, values, self.m, self.phi)


def _check_shape(values, rho_disc, z_disc):
    expected = (rho_disc.n_points, z_disc.n_points)
    if np.shape(values) != expected:
        raise ShapeMismatch(f"Field of shape {np.shape(values)} on a {expected} grid")


def assemble_potential(pot: CompositePotential, rho, z):
    """V(rho, z); canonical is (rho^2/2)(V(rho) + V(z))."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ModelParameterError("The composite potential is defined for rho > 0")

    v_z = np.asarray(pot.axial.potential(z, pot.variant))
    if pot.assembly is Assembly.CANONICAL:
        value = rho * rho / 2.0 * (np.asarray(pot.radial.potential(rho)) + v_z)
    else:
        if pot.radial.kind == "coulomb":
            radial = -2.0 * rho
        else:
            radial = pot.radial.a * pot.radial.a * rho**4 / 4.0
        axial = v_z if pot.axial.kind == "samsonov" else rho * rho * v_z
        value = radial + axial
    return value.item() if np.ndim(value) == 0 else value


def _two_mw(mass: MassProfile, ordering: AmbiguityOrdering, rho, z, phi):
    g1, g2 = mass.rho_log_derivatives(rho)
    f1, f2 = mass.phi_log_derivatives(phi)
    k1, k2 = mass.z_log_derivatives(z)
    inv_rho2 = 1.0 / (rho * rho)
    squares = g1 * g1 + inv_rho2 * f1 * f1 + k1 * k1
    curvatures = g1 / rho + g2 + inv_rho2 * f2 + k2
    return ordering.zeta * squares - (ordering.beta + 1.0) * curvatures


def ordering_potential_w(
    mass: MassProfile, ordering: AmbiguityOrdering, rho, z, phi: float = 0.0
):
    """W from the ordering terms, i.e. the 2MW expression divided by 2M."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ModelParameterError("The ordering potential is defined for rho > 0")
    z = np.asarray(z, dtype=float)
    value = _two_mw(mass, ordering, rho, z, phi) / (2.0 * mass.evaluate(rho, phi, z))
    return value.item() if np.ndim(value) == 0 else value


def _second_difference(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Three-point second difference with zero Dirichlet padding."""
    padded = np.pad(values, [(1, 1) if i == axis else (0, 0) for i in range(values.ndim)])
    lower = np.take(padded, range(0, values.shape[axis]), axis=axis)
    upper = np.take(padded, range(2, values.shape[axis] + 2), axis=axis)
    return (lower - 2.0 * values + upper) / (h * h)


def _grids(field: GridField):
    return field.rho_disc.nodes[:, None], field.z_disc.nodes[None, :]


def apply_pdm_hamiltonian(
    field: GridField, pot: CompositePotential, mass: MassProfile, ordering: AmbiguityOrdering
) -> GridField:
    """Left side of the PDM equation minus (2MV - MW) Psi; equals -2ME Psi on an eigenpair.

    Each first-derivative pair is applied in the symmetric form
    s^-1 [D2(s Psi) - (s''/s) s Psi], s = (rho/g)^(1/2) radially and k^(-1/2) axially.
    """
    _check_shape(field.values, field.rho_disc, field.z_disc)
    rho, z = _grids(field)
    psi = field.values.astype(complex)
    m = field.m

    g1, g2 = mass.rho_log_derivatives(rho)
    s_rho = np.sqrt(rho / mass.g(rho))
    q_rho = 0.5 * (-1.0 / (rho * rho) - g2 + g1 * g1) + 0.25 * (1.0 / rho - g1) ** 2
    radial = (_second_difference(s_rho * psi, field.rho_disc.h, 0) - q_rho * s_rho * psi) / s_rho

    k1, k2 = mass.z_log_derivatives(z)
    s_z = mass.k(z) ** -0.5
    q_z = -0.5 * (k2 - k1 * k1) + 0.25 * k1 * k1
    axial = (_second_difference(s_z * psi, field.z_disc.h, 1) - q_z * s_z * psi) / s_z

    f1, _ = mass.phi_log_derivatives(field.phi)
    azimuthal = (-(m * m) - 1j * m * f1) / (rho * rho) * psi

    two_mv = 2.0 * mass.evaluate(rho, field.phi, z) * assemble_potential(pot, rho, z)
    mw = 0.5 * _two_mw(mass, ordering, rho, z, field.phi)
    return field.with_values(radial + azimuthal + axial - (two_mv - mw) * psi)


def _weighted_norm(values, mass_grid, rho, field: GridField) -> float:
    """Discrete L2 norm of values / M with the cylindrical volume element."""
    weight = rho * field.rho_disc.h * field.z_disc.h
    return float(np.sqrt(np.sum(np.abs(values / mass_grid) ** 2 * weight)))


def residual_norm(
    field: GridField,
    energy: complex,
    pot: CompositePotential,
    mass: MassProfile,
    ordering: AmbiguityOrdering,
) -> float:
    """||out + 2 M E Psi|| / ||2 M Psi||, which is ||(H - E) Psi|| / ||Psi||."""
    rho, z = _grids(field)
    mass_grid = mass.evaluate(rho, field.phi, z)
    out = apply_pdm_hamiltonian(field, pot, mass, ordering).values
    two_m_psi = 2.0 * mass_grid * field.values
    denominator = _weighted_norm(two_m_psi, mass_grid, rho, field)
    if denominator == 0.0:
        raise ModelParameterError("Residual of a zero field is undefined")
    return _weighted_norm(out + energy * two_m_psi, mass_grid, rho, field) / denominator


def rayleigh_energy(
    field: GridField, pot: CompositePotential, mass: MassProfile, ordering: AmbiguityOrdering
) -> complex:
    """The energy that minimises residual_norm for a fixed field."""
    rho, z = _grids(field)
    mass_grid = mass.evaluate(rho, field.phi, z)
    out = apply_pdm_hamiltonian(field, pot, mass, ordering).values
    psi = field.values
    numerator = np.sum(np.conj(psi) * out / (2.0 * mass_grid) * rho)
    return complex(-numerator / np.sum(np.abs(psi) ** 2 * rho))


def recombine(
    rho_disc: Discretization,
    z_disc: Discretization,
    u: np.ndarray,
    zvec: np.ndarray,
    m: int,
    mass: Optional[MassProfile] = None,
    phi: float = 0.0,
) -> GridField:
    """Psi = (U / s_rho)(Z / s_z) from the 1D oracle eigenvectors."""
    mass = mass or MassProfile.canonical()
    rho = rho_disc.nodes
    s_rho = np.sqrt(rho / mass.g(rho))
    s_z = mass.k(z_disc.nodes) ** -0.5
    values = np.outer(np.asarray(u) / s_rho, np.asarray(zvec) / s_z)
    return GridField(rho_disc, z_disc, values, m, phi)


def default_composite_grids(
    radial: RadialModel, axial: AxialModel
) -> tuple[Discretization, Discretization]:
    grids = load_grids()["composite"]
    entry = grids[radial.kind]
    scale = 1.0 if radial.kind == "coulomb" else 1.0 / math.sqrt(radial.a)
    rho_disc = Discretization(entry["x_min"], entry["x_max"] * scale, entry["n_points"])
    box = default_axial_grid(axial)
    return rho_disc, Discretization(box.x_min, box.x_max, grids["z_points"][axial.kind])


def _axial_vector(axial: AxialModel, z_disc: Discretization, kz2: complex, variant) -> np.ndarray:
    op = discretize_axial(axial, z_disc, variant)
    if op.is_real_symmetric:
        values, vectors = eig_sym_tridiag(op, op.n, vectors=True)
        return vectors[:, int(np.argmin(np.abs(values - kz2)))]
    values = eig_complex(op, op.n)
    return inverse_iteration(op, values[int(np.argmin(np.abs(values - kz2)))])


def _radial_vector(radial: RadialModel, rho_disc: Discretization, ell: float, n_rho: int):
    op = discretize_radial(radial, ell, rho_disc)
    _, vectors = eig_sym_tridiag(op, n_rho + 1, vectors=True)
    return vectors[:, n_rho]


def verify_composite(
    radial: RadialModel,
    axial: AxialModel,
    ordering: AmbiguityOrdering,
    state: QuantumNumbers,
    variant=FormulaVariant.PAPER,
    rho_disc: Optional[Discretization] = None,
    z_disc: Optional[Discretization] = None,
    refinements: int = 2,
) -> VerificationReport:
    """Residual of the recombined separated eigenfunction on a base grid and its refinements.

    The radial factor always uses the standard Coulombic bracket, the one consistent with
    the discretised radial equation; the variant selects the axial closed form.
    """
    variant = FormulaVariant(variant)
    n_rho, m, n_z = state
    default_rho, default_z = default_composite_grids(radial, axial)
    rho_disc = rho_disc or default_rho
    z_disc = z_disc or default_z
    mass = MassProfile.canonical()
    pot = CompositePotential(radial, axial, Assembly.CANONICAL, variant)

    kz2 = kz2_axial(axial, n_z, variant)
    if radial.kind == "coulomb":
        level = energy_coulomb(m, n_rho, kz2, ordering, FormulaVariant.STANDARD, n_z=n_z)
    else:
        level = energy_oscillator(m, n_rho, kz2, radial.a, ordering, variant, n_z=n_z)

    report = VerificationReport(
        target="composite",
        model={
            "radial": radial.describe(),
            "axial": axial.describe(),
            "n_rho": n_rho,
            "m": m,
            "n_z": n_z,
        },
        grid={"rho": rho_disc.describe(), "z": z_disc.describe()},
        variant=variant,
        labels=[state],
        spectrum=[],
        analytic={},
        tolerance=0.0,
        relative=False,
        convergence=[],
        convergence_band=COMPOSITE_CONVERGENCE_BAND,
        details={"energy": level.value, "kz2": kz2, "ell": level.ell},
    )
    if FLAG_NONNORMALIZABLE_SUSPECT in level.flags:
        # the radial operator only sees ell^2
        report.warnings.append(
            f"Implied ell={level.ell.real:g} is negative; the radial factor built from ell^2"
            " belongs to a different state and the residual will not converge"
        )
        _LOGGER.warning(report.warnings[-1])

    residuals = []
    rayleigh = []
    for _ in range(refinements + 1):
        try:
            u = _radial_vector(radial, rho_disc, level.ell, n_rho)
            zvec = _axial_vector(axial, z_disc, kz2, variant)
        except PdmSpectraError as error:
            report.warnings.append(f"Cannot build the separated eigenfunction: {error}")
            _LOGGER.warning(report.warnings[-1])
            return report
        field = recombine(rho_disc, z_disc, u, zvec, m, mass)
        residuals.append(residual_norm(field, level.value, pot, mass, ordering))
        rayleigh.append(rayleigh_energy(field, pot, mass, ordering))
        _LOGGER.debug(
            "Composite residual %.3e on %d x %d", residuals[-1], rho_disc.n_points, z_disc.n_points
        )
        rho_disc, z_disc = rho_disc.refine(), z_disc.refine()

    report.convergence = [
        coarse / fine if fine else math.inf for coarse, fine in zip(residuals, residuals[1:])
    ]
    report.details.update({"residuals": residuals, "rayleigh_energy": rayleigh})
    return report


class ShapeMismatch(PdmSpectraError):
    """Field values do not fit the grid."""
