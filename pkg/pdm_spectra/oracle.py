"""oracle.py: Finite-difference operators and eigensolvers for the 1D equations."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, eigvals, solve_banded

from .const import (
    _LOGGER,
    AXIAL_COMPLEX_ABS_TOL,
    AXIAL_REAL_REL_TOL,
    BOUNDARY_AMPLITUDE_TOL,
    CONJUGATION_TOL,
    CONVERGENCE_BAND,
    MAX_DENSE_POINTS,
    MIN_GRID_POINTS,
    RADIAL_REL_TOL,
    REAL_LEVEL_IMAG_TOL,
    RESIDUAL_RELATIVE_TOL,
    SAMSONOV_GAP_VALUE,
    SAMSONOV_GAP_WINDOW,
)
from .model import (
    AxialModel,
    FormulaVariant,
    ModelParameterError,
    PdmSpectraError,
    RadialModel,
)
from .spectra import admissible_nz, kz2_axial, kz2_coulomb_internal

# Default boxes and resolutions per model
GRIDS_FILE = Path(__file__).parent / "grids.json"

# Numeric eigenvalues fetched beyond the analytic ones, for the unmatched listing
EXTRA_EIGENVALUES = 4


def load_grids() -> dict:
    with Path.open(GRIDS_FILE, encoding="utf-8") as file:
        return json.loads(file.read())


@dataclass(frozen=True)
class Discretization:
    """Uniform grid of interior nodes x_min + i h, i = 1..n_points, Dirichlet at both ends."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < MIN_GRID_POINTS:
            raise ModelParameterError(
                f"A grid needs at least {MIN_GRID_POINTS} points, got {self.n_points}"
            )
        if not self.x_max > self.x_min:
            raise ModelParameterError(f"Empty grid box [{self.x_min}, {self.x_max}]")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(1, self.n_points + 1)

    def refine(self) -> Discretization:
        """Same box, half the step."""
        return Discretization(self.x_min, self.x_max, 2 * self.n_points + 1)

    def describe(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n_points": self.n_points, "h": self.h}


def default_radial_grid(model: RadialModel) -> Discretization:
    entry = load_grids()["radial"][model.kind]
    scale = 1.0 if model.kind == "coulomb" else 1.0 / math.sqrt(model.a)
    return Discretization(entry["x_min"] * scale, entry["x_max"] * scale, entry["n_points"])


def default_axial_grid(model: AxialModel) -> Discretization:
    entry = load_grids()["axial"][model.kind]
    if model.domain is not None:
        return Discretization(*model.domain, entry["n_points"])
    scale = 1.0 / model.eps if model.kind == "morse" else 1.0
    return Discretization(entry["x_min"] * scale, entry["x_max"] * scale, entry["n_points"])


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric-placement tridiagonal matrix; off_diagonal sits above and below the diagonal."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        if len(self.off_diagonal) != len(self.diagonal) - 1:
            raise ModelParameterError(
                f"Off-diagonal length {len(self.off_diagonal)}"
                f" does not fit {len(self.diagonal)} rows"
            )

    @property
    def n(self) -> int:
        return len(self.diagonal)

    @property
    def is_real_symmetric(self) -> bool:
        return not (np.any(np.imag(self.diagonal)) or np.any(np.imag(self.off_diagonal)))

    def to_dense(self) -> np.ndarray:
        dense = np.diag(self.diagonal).astype(np.result_type(self.diagonal, self.off_diagonal))
        idx = np.arange(self.n - 1)
        dense[idx, idx + 1] = self.off_diagonal
        dense[idx + 1, idx] = self.off_diagonal
        return dense

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out


def _laplacian_operator(disc: Discretization, potential: np.ndarray) -> TridiagonalOperator:
    h2 = disc.h * disc.h
    return TridiagonalOperator(
        diagonal=2.0 / h2 + potential,
        off_diagonal=np.full(disc.n_points - 1, -1.0 / h2),
    )


def discretize_radial(model: RadialModel, ell: float, disc: Discretization) -> TridiagonalOperator:
    """-d^2 + (ell^2 - 1/4)/rho^2 + V(rho); its eigenvalues are -K_z^2."""
    if not disc.x_min > 0:
        raise DomainMismatch(f"Radial grid must start at rho > 0, got x_min={disc.x_min}")
    if complex(ell).imag != 0.0:
        raise ModelParameterError(f"The radial oracle needs a real ell, got {ell}")

    ell = complex(ell).real
    rho = disc.nodes
    potential = (ell * ell - 0.25) / (rho * rho) + model.potential(rho)
    return _laplacian_operator(disc, potential)


def _same_box(disc: Discretization, box: tuple[float, float]) -> bool:
    return math.isclose(disc.x_min, box[0], abs_tol=1e-12) and math.isclose(
        disc.x_max, box[1], abs_tol=1e-12
    )


def discretize_axial(
    model: AxialModel, disc: Discretization, variant=FormulaVariant.PAPER
) -> TridiagonalOperator:
    """-d^2 + V(z); its eigenvalues are K_z^2. The variant picks the Samsonov form."""
    if model.domain is not None and not _same_box(disc, model.domain):
        raise DomainMismatch(
            f"The {model.kind} problem lives on [{model.domain[0]:g}, {model.domain[1]:g}],"
            f" got [{disc.x_min:g}, {disc.x_max:g}]"
        )

    if model.kind == "well":
        potential = np.zeros(disc.n_points)
    else:
        potential = np.asarray(model.potential(disc.nodes, variant))
    return _laplacian_operator(disc, potential)


def gershgorin_discs(op: TridiagonalOperator) -> tuple[np.ndarray, np.ndarray]:
    """(centres, radii) of the row discs."""
    radii = np.zeros(op.n)
    radii[:-1] += np.abs(op.off_diagonal)
    radii[1:] += np.abs(op.off_diagonal)
    return np.asarray(op.diagonal), radii


def gershgorin_scale(op: TridiagonalOperator) -> float:
    """Bound on the spectral radius from the row discs."""
    centres, radii = gershgorin_discs(op)
    return float(np.max(np.abs(centres) + radii))


def sturm_count(op: TridiagonalOperator, lam) -> np.ndarray:
    """Eigenvalues strictly below each shift, from the signs of the LDL^T pivots."""
    if not op.is_real_symmetric:
        raise ComplexOperatorError("Sturm counts need a real symmetric operator")

    shifts = np.atleast_1d(np.asarray(lam, dtype=float))
    diagonal = np.real(op.diagonal)
    off2 = np.real(op.off_diagonal) ** 2
    tiny = np.finfo(float).tiny
    count = np.zeros(shifts.shape, dtype=int)

    pivot = diagonal[0] - shifts
    for i in range(op.n):
        if i:
            pivot = diagonal[i] - shifts - off2[i - 1] / pivot
        pivot = np.where(pivot == 0.0, -tiny, pivot)
        count += pivot < 0.0
    return count if np.ndim(lam) else int(count[0])


def eig_sym_tridiag(op: TridiagonalOperator, k: int, vectors: bool = False):
    """k smallest eigenvalues by Sturm bisection, ascending; with vectors, (values, columns)."""
    if not op.is_real_symmetric:
        raise ComplexOperatorError("The symmetric solver received a complex operator")
    if not 1 <= k <= op.n:
        raise ModelParameterError(f"Requested {k} eigenvalues from a {op.n}x{op.n} operator")

    # tol=0 lets stebz bisect to machine precision
    return eigh_tridiagonal(
        np.real(op.diagonal),
        np.real(op.off_diagonal),
        eigvals_only=not vectors,
        select="i",
        select_range=(0, k - 1),
        check_finite=False,
        tol=0.0,
        lapack_driver="stebz",
    )


def inverse_iteration(op: TridiagonalOperator, lam: complex, steps: int = 3) -> np.ndarray:
    """Unit eigenvector for a known eigenvalue, by shifted banded solves."""
    dtype = np.result_type(op.diagonal, op.off_diagonal, complex(lam))
    shift = lam + 1e-10 * max(1.0, abs(lam))
    bands = np.zeros((3, op.n), dtype=dtype)
    bands[0, 1:] = op.off_diagonal
    bands[1, :] = op.diagonal - shift
    bands[2, :-1] = op.off_diagonal

    vector = np.ones(op.n, dtype=dtype)
    for _ in range(steps):
        try:
            vector = solve_banded((1, 1), bands, vector, check_finite=False)
        except LinAlgError:
            bands[1, :] -= 1e-12 * max(1.0, abs(lam))
            vector = solve_banded((1, 1), bands, vector, check_finite=False)
        vector = vector / np.linalg.norm(vector)
    return vector


def eigen_residual(op: TridiagonalOperator, lam: complex, vector: np.ndarray) -> float:
    """||T v - lam v|| / ||v||."""
    return float(np.linalg.norm(op.matvec(vector) - lam * vector) / np.linalg.norm(vector))


def eig_complex(op: TridiagonalOperator, k: int, vectors: bool = False):
    """k eigenvalues of smallest real part from complex Hessenberg QR, sorted by real part."""
    if op.n > MAX_DENSE_POINTS:
        raise ModelParameterError(
            f"Dense eigensolves are limited to {MAX_DENSE_POINTS} points, got {op.n}"
        )
    if not 1 <= k <= op.n:
        raise ModelParameterError(f"Requested {k} eigenvalues from a {op.n}x{op.n} operator")

    try:
        values = eigvals(op.to_dense().astype(complex), check_finite=False)
    except LinAlgError as error:
        _LOGGER.error("Complex QR failed on a %dx%d operator: %s", op.n, op.n, error)
        raise NonConvergence(str(error)) from error

    values = values[np.lexsort((values.imag, values.real))][:k]
    if not vectors:
        return values
    columns = np.column_stack([inverse_iteration(op, lam) for lam in values])
    bound = RESIDUAL_RELATIVE_TOL * gershgorin_scale(op)
    for lam, column in zip(values, columns.T):
        residual = eigen_residual(op, lam, column)
        if residual > bound:
            _LOGGER.warning("Eigenpair at %s has residual %.2e above %.2e", lam, residual, bound)
    return values, columns


def conjugation_mismatch(values) -> np.ndarray:
    """Per value, the distance from its conjugate to the nearest value of the same list."""
    values = np.asarray(values, dtype=complex)
    return np.array([np.min(np.abs(values - np.conj(value))) for value in values])


def convergence_ratio(values_h, values_h2, values_h4) -> np.ndarray:
    """(lam_h - lam_h/2) / (lam_h/2 - lam_h/4); tends to 4 for a second-order stencil."""
    values_h, values_h2, values_h4 = (np.asarray(v) for v in (values_h, values_h2, values_h4))
    return (values_h - values_h2) / (values_h2 - values_h4)


def richardson_limit(values_h, values_h2) -> np.ndarray:
    return (4.0 * np.asarray(values_h2) - np.asarray(values_h)) / 3.0


@dataclass
class VerificationReport:
    """Numeric spectrum of one problem against the analytic values of each variant.

    Matches and deviations are derived from the stored spectrum on every access.
    """

    target: str
    model: dict
    grid: dict
    variant: FormulaVariant
    labels: list
    spectrum: list
    analytic: dict
    tolerance: float
    relative: bool
    convergence: Optional[list] = None
    convergence_band: Optional[tuple] = None
    neighbourhood: list = field(default_factory=list)
    threshold: Optional[float] = None
    warnings: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def _nearest(self, value) -> int:
        return int(np.argmin(np.abs(np.asarray(self.spectrum) - value)))

    def matched(self, variant=None) -> list:
        variant = FormulaVariant(variant or self.variant)
        if not self.spectrum:
            return []
        return [self.spectrum[self._nearest(value)] for value in self.analytic.get(variant, [])]

    def deviations(self, variant=None) -> list[tuple[float, float]]:
        """(absolute, relative) deviation per analytic value."""
        variant = FormulaVariant(variant or self.variant)
        rows = []
        for value, numeric in zip(self.analytic.get(variant, []), self.matched(variant)):
            absolute = abs(numeric - value)
            rows.append((absolute, absolute / abs(value) if value else math.inf))
        return rows

    def variant_passes(self, variant=None) -> bool:
        if self.analytic.get(FormulaVariant(variant or self.variant)) and not self.spectrum:
            return False
        column = 1 if self.relative else 0
        return all(row[column] <= self.tolerance for row in self.deviations(variant))

    @property
    def unmatched(self) -> list:
        """Numeric values below the threshold unclaimed by the judged variant."""
        if not self.spectrum or self.threshold is None:
            return []
        claimed = {self._nearest(v) for v in self.analytic.get(FormulaVariant(self.variant), [])}
        return [
            value
            for index, value in enumerate(self.spectrum)
            if index not in claimed and np.real(value) < self.threshold
        ]

    @property
    def convergence_ok(self) -> bool:
        if self.convergence_band is None:
            return True
        low, high = self.convergence_band
        return bool(self.convergence) and all(low <= ratio <= high for ratio in self.convergence)

    @property
    def passed(self) -> bool:
        return self.variant_passes() and self.convergence_ok


def _study(solve, disc: Discretization, count: int) -> tuple[list[float], list[float]]:
    """Per-eigenvalue convergence ratio over disc, disc/2, disc/4 and the Richardson limit."""
    finer = disc.refine()
    levels = [solve(d)[:count] for d in (disc, finer, finer.refine())]
    ratios = [float(r) for r in convergence_ratio(*levels)]
    return ratios, [float(v) for v in richardson_limit(levels[1], levels[2])]


def verify_radial(
    model: RadialModel,
    ell: float,
    n_max: int,
    disc: Optional[Discretization] = None,
    variant=FormulaVariant.PAPER,
) -> VerificationReport:
    """Radial eigenvalues (-K_z^2) for n_rho = 0..n_max-1 against both closed forms."""
    disc = disc or default_radial_grid(model)
    ell = complex(ell).real
    k = min(n_max + EXTRA_EIGENVALUES, disc.n_points)

    def solve(d):
        return eig_sym_tridiag(discretize_radial(model, ell, d), k)

    spectrum = solve(disc)
    ratios, limits = _study(solve, disc, n_max)
    analytic = {}
    for option in FormulaVariant:
        if model.kind == "coulomb":
            values = [-kz2_coulomb_internal(ell, n, option) for n in range(n_max)]
        else:
            values = [model.a * (2 * n + ell + 1.0) for n in range(n_max)]
        analytic[option] = values

    report = VerificationReport(
        target="radial",
        model={**model.describe(), "ell": ell},
        grid=disc.describe(),
        variant=FormulaVariant(variant),
        labels=list(range(n_max)),
        spectrum=[float(v) for v in spectrum],
        analytic=analytic,
        tolerance=RADIAL_REL_TOL,
        relative=True,
        convergence=ratios,
        # the Coulombic singularity slows convergence below ell = 1/2
        convergence_band=CONVERGENCE_BAND if ell >= 0.5 else None,
        threshold=0.0 if model.kind == "coulomb" else None,
        details={"richardson": limits},
    )
    _LOGGER.info(
        "Radial %s ell=%g: paper %s, standard %s",
        model.kind,
        ell,
        "pass" if report.variant_passes(FormulaVariant.PAPER) else "fail",
        "pass" if report.variant_passes(FormulaVariant.STANDARD) else "fail",
    )
    return report


def _split_levels(report: VerificationReport) -> list[dict]:
    """Real analytic levels whose numeric counterpart is a complex pair, each with a warning."""
    split = []
    analytic = report.analytic[report.variant]
    for label, value, numeric in zip(report.labels, analytic, report.matched()):
        if complex(value).imag == 0.0 and abs(numeric.imag) > REAL_LEVEL_IMAG_TOL:
            split.append({"n_z": label, "value": numeric})
            report.warnings.append(
                f"Level n_z={label} splits into the complex pair"
                f" {numeric.real:.6g} \u00b1 {abs(numeric.imag):.2g}i"
            )
    return split


def _boundary_warnings(op: TridiagonalOperator, matched: list) -> list[str]:
    warnings = []
    for value in matched:
        vector = inverse_iteration(op, value)
        amplitude = float(max(abs(vector[0]), abs(vector[-1])) / np.max(np.abs(vector)))
        if amplitude > BOUNDARY_AMPLITUDE_TOL:
            warnings.append(
                f"Eigenfunction at {value:.6g} keeps {amplitude:.2e} of its peak on the box edge"
            )
    return warnings


def verify_axial(
    model: AxialModel,
    n_max: int,
    disc: Optional[Discretization] = None,
    variant=FormulaVariant.PAPER,
) -> VerificationReport:
    """Numeric K_z^2 against the closed forms; complex QR for the PT-symmetric models."""
    disc = disc or default_axial_grid(model)
    variant = FormulaVariant(variant)
    states = admissible_nz(model, n_max)
    op = discretize_axial(model, disc, variant)
    k = min(len(states) + EXTRA_EIGENVALUES, disc.n_points)
    warnings = []
    details = {}
    convergence = None
    band = None

    if op.is_real_symmetric:
        spectrum = [float(v) for v in eig_sym_tridiag(op, k)]
        if states:
            # coarse enough that h^2 differences stay far above roundoff at h/4
            study_points = load_grids()["axial"][model.kind].get("study_points", disc.n_points)
            study = Discretization(disc.x_min, disc.x_max, min(disc.n_points, study_points))
            convergence, details["richardson"] = _study(
                lambda d: eig_sym_tridiag(discretize_axial(model, d, variant), k),
                study,
                len(states),
            )
        band = CONVERGENCE_BAND
        tolerance, relative = AXIAL_REAL_REL_TOL, True
    else:
        try:
            spectrum = [complex(v) for v in eig_complex(op, disc.n_points)]
        except NonConvergence as error:
            # LAPACK hands back no eigenvalues when its QR fails
            spectrum = []
            warnings.append(f"Complex QR did not converge, no eigenvalues reported: {error}")
        if spectrum:
            mismatch = conjugation_mismatch(spectrum) / np.maximum(1.0, np.abs(spectrum))
            details["conjugation_mismatch"] = float(np.max(mismatch))
            if details["conjugation_mismatch"] > CONJUGATION_TOL:
                warnings.append(
                    "Spectrum is closed under conjugation only to"
                    f" {details['conjugation_mismatch']:.2e}"
                )
        tolerance, relative = AXIAL_COMPLEX_ABS_TOL, False

    analytic = {option: [kz2_axial(model, n, option) for n in states] for option in FormulaVariant}
    report = VerificationReport(
        target="axial",
        model=model.describe(),
        grid=disc.describe(),
        variant=variant,
        labels=states,
        spectrum=spectrum if op.is_real_symmetric else spectrum[:k],
        analytic=analytic,
        tolerance=tolerance,
        relative=relative,
        convergence=convergence,
        convergence_band=band,
        threshold=0.0 if model.kind in ("morse", "scarf2") else None,
        warnings=warnings,
        details=details,
    )

    if not op.is_real_symmetric and report.spectrum:
        report.details["complex_pairs"] = _split_levels(report)
    if model.kind == "samsonov" and spectrum:
        report.neighbourhood = [
            v for v in spectrum if abs(v - SAMSONOV_GAP_VALUE) <= SAMSONOV_GAP_WINDOW
        ]
    if model.kind in ("morse", "scarf2") and report.spectrum and states:
        report.warnings.extend(_boundary_warnings(op, report.matched()))
    for warning in report.warnings:
        _LOGGER.warning(warning)
    if not report.passed:
        _LOGGER.info("Axial %s deviates from the %s closed form", model.kind, variant.value)
    return report


class DomainMismatch(PdmSpectraError):
    """Grid box incompatible with the problem's fixed domain."""


class ComplexOperatorError(PdmSpectraError):
    """A complex operator was given to a real symmetric routine."""


class NonConvergence(PdmSpectraError):
    """The eigensolver reached its iteration cap."""
