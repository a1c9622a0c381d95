"""spectra.py: Closed-form separation constants and composite energy spectra."""
from __future__ import annotations

import cmath
import math
from typing import NamedTuple, Optional

from .const import (
    _LOGGER,
    FLAG_COMPLEX_PAIR,
    FLAG_NONNORMALIZABLE_SUSPECT,
    FLAG_PAPER_VARIANT,
    FLAG_REAL,
    FLAG_STANDARD_VARIANT,
)
from .model import (
    AmbiguityOrdering,
    AxialModel,
    FormulaVariant,
    ModelParameterError,
    PdmSpectraError,
    QuantumNumbers,
    RadialModel,
    ordering_shift,
)

VARIANT_FLAGS = {
    FormulaVariant.PAPER: FLAG_PAPER_VARIANT,
    FormulaVariant.STANDARD: FLAG_STANDARD_VARIANT,
}

COULOMB = RadialModel.coulomb()


class EnergyLevel(NamedTuple):
    value: complex
    labels: QuantumNumbers
    kz2: complex
    ell: complex
    flags: frozenset

    @property
    def is_complex(self) -> bool:
        return self.value.imag != 0.0


class QuantumRanges(NamedTuple):
    """Inclusive ranges: n_rho in [nrho_min, nrho_max], |m| <= m_max, n_z up to nz_max."""

    nrho_max: int
    m_max: int
    nz_max: int
    nrho_min: int = 0


class SkippedState(NamedTuple):
    code: str
    n_z: int
    n_rho: Optional[int] = None
    m: Optional[int] = None


class SpectrumResult(NamedTuple):
    levels: list
    skipped: list


def kz_well(n_z: int, L: float) -> float:
    """K_z = n_z pi / L for the infinite well on [0, L]."""
    if not L > 0:
        raise ModelParameterError(f"Well width must be positive, got L={L}")
    if n_z < 1:
        raise StateOutOfRange("The infinite well has no n_z=0 state", n_z=n_z)
    return n_z * math.pi / L


def kz2_morse(D: float, eps: float, n_z: int, variant=FormulaVariant.PAPER) -> float:
    if not (D > 0 and eps > 0):
        raise ModelParameterError(f"Morse requires D > 0 and eps > 0, got D={D}, eps={eps}")
    if n_z < 0:
        raise StateOutOfRange("Morse quantum number must be >= 0", n_z=n_z)

    bracket = math.sqrt(D) / eps - n_z - 0.5
    if not bracket > 0:
        raise BoundStateCountExceeded(
            f"sqrt(D)/eps - n_z - 1/2 = {bracket:g} <= 0,"
            " the state would pair into complex energies",
            n_z=n_z,
        )
    if FormulaVariant(variant) is FormulaVariant.STANDARD:
        depth = math.sqrt(D) - (n_z + 0.5) * eps
        return -(depth * depth)
    return bracket


def kz2_scarf2(A: float, n_z: int) -> float:
    """Piecewise PT Scarf II values; A < 2 leaves a single level at -1/4."""
    if not A > 0:
        raise ModelParameterError(f"Scarf II requires A > 0, got A={A}")
    if A < 2.0:
        return -0.25
    if n_z < 0 or not n_z < (A - 1.0) / 2.0:
        raise StateOutOfRange(
            f"Scarf II with A={A:g} admits only n_z < {(A - 1.0) / 2.0:g}", n_z=n_z
        )
    bracket = n_z + (1.0 - A) / 2.0
    return -(bracket * bracket)


def kz2_samsonov(n_z: int) -> float:
    if n_z <= 0:
        raise StateOutOfRange("Samsonov quantum number starts at 1", n_z=n_z)
    if n_z == 2:
        raise MissingState("The Samsonov spectrum has no n_z=2 level", n_z=n_z)
    return n_z * n_z / 4.0


def kz2_axial(axial: AxialModel, n_z: int, variant=FormulaVariant.PAPER) -> float:
    """K_z^2 of the axial state n_z, raising a StatePreconditionError for absent states."""
    if axial.kind == "well":
        kz = kz_well(n_z, axial.L)
        return kz * kz
    if axial.kind == "morse":
        return kz2_morse(axial.D, axial.eps, n_z, variant)
    if axial.kind == "scarf2":
        if axial.A < 2.0 and n_z > 0:
            # the single -1/4 level is labelled n_z=0
            raise StateOutOfRange(f"Scarf II with A={axial.A:g} < 2 has only n_z=0", n_z=n_z)
        return kz2_scarf2(axial.A, n_z)
    return kz2_samsonov(n_z)


def _coulomb_offset(variant) -> float:
    return 0.5 if FormulaVariant(variant) is FormulaVariant.STANDARD else 1.0


def kz2_coulomb_internal(ell: float, n_rho: int, variant=FormulaVariant.PAPER) -> float:
    """K_z^2 that the Coulombic radial equation fixes for a given ell."""
    denominator = n_rho + ell + _coulomb_offset(variant)
    return 1.0 / (denominator * denominator)


def implied_ell(
    radial: RadialModel,
    n_rho: int,
    kz2: complex,
    variant=FormulaVariant.PAPER,
    conjugate: bool = False,
) -> complex:
    """ell reconstructed from a level; a real negative value cannot be normalized.

    conjugate=True takes the partner branch conj(K_z) of the Coulombic root.
    """
    if radial.kind == "coulomb":
        kz = cmath.sqrt(complex(kz2))
        if conjugate:
            kz = kz.conjugate()
        return 1.0 / kz - n_rho - _coulomb_offset(variant)
    return -(complex(kz2) / radial.a + 2 * n_rho + 1)


def _level_flags(value: complex, kz2: complex, ell: complex, variant, pair: bool) -> frozenset:
    flags = {VARIANT_FLAGS[FormulaVariant(variant)]}
    if pair:
        flags.add(FLAG_COMPLEX_PAIR)
    elif value.imag == 0.0:
        flags.add(FLAG_REAL)
    if ell.imag == 0.0 and ell.real < 0.0:
        flags.add(FLAG_NONNORMALIZABLE_SUSPECT)
    return frozenset(flags)


def _coulomb_pairs(kz2: complex) -> bool:
    kz2 = complex(kz2)
    return kz2.imag != 0.0 or kz2.real < 0.0


def energy_coulomb(
    m: int,
    n_rho: int,
    kz2: complex,
    ordering: AmbiguityOrdering,
    variant=FormulaVariant.PAPER,
    n_z: int = 0,
    conjugate: bool = False,
) -> EnergyLevel:
    """E = (m^2+3)/2 - (zeta-beta) - (1/K_z - n_rho - 1)^2 / 2 with K_z the principal root.

    conjugate=True evaluates the partner branch conj(K_z), which for kz2 < 0 is -K_z
    and always yields the complex conjugate energy.
    """
    kz2 = complex(kz2)
    if kz2 == 0:
        raise DivisionByZero("Coulombic energy needs K_z^2 != 0", n_z=n_z, n_rho=n_rho, m=m)

    ell = implied_ell(COULOMB, n_rho, kz2, variant, conjugate)
    value = (m * m + 3) / 2.0 - ordering_shift(ordering) - 0.5 * (ell * ell)
    if not _coulomb_pairs(kz2):
        value = complex(value.real, 0.0)
        ell = complex(ell.real, 0.0)

    return EnergyLevel(
        value=value,
        labels=QuantumNumbers(n_rho, m, n_z),
        kz2=kz2.conjugate() if conjugate else kz2,
        ell=ell,
        flags=_level_flags(value, kz2, ell, variant, _coulomb_pairs(kz2)),
    )


def energy_oscillator(
    m: int,
    n_rho: int,
    kz2: complex,
    a: float,
    ordering: AmbiguityOrdering,
    variant=FormulaVariant.PAPER,
    n_z: int = 0,
) -> EnergyLevel:
    """E = (m^2+3)/2 - (zeta-beta) - (K_z^2/a + 2 n_rho + 1)^2 / 2."""
    if not a > 0:
        raise ModelParameterError(f"Oscillator requires a > 0, got a={a}")

    kz2 = complex(kz2)
    ell = implied_ell(RadialModel.oscillator(a), n_rho, kz2, variant)
    value = complex((m * m + 3) / 2.0 - ordering_shift(ordering) - 0.5 * (ell * ell))
    pair = kz2.imag != 0.0
    return EnergyLevel(
        value=value,
        labels=QuantumNumbers(n_rho, m, n_z),
        kz2=kz2,
        ell=ell,
        flags=_level_flags(value, kz2, ell, variant, pair),
    )


def admissible_states(
    axial: AxialModel, nz_max: Optional[int] = None, variant=FormulaVariant.PAPER
):
    """Yield (n_z, kz2) for admissible axial states and SkippedState for the rest.

    Without nz_max the walk is open-ended; callers stop it.
    """
    n_z = axial.nz_start
    while nz_max is None or n_z <= nz_max:
        try:
            yield n_z, kz2_axial(axial, n_z, variant)
        except StatePreconditionError as error:
            _LOGGER.debug("Skipping %s: %s", error.code, error)
            yield SkippedState(code=error.code, n_z=n_z)
        n_z += 1


def admissible_nz(axial: AxialModel, count: int) -> list[int]:
    """The first count axial quantum numbers that exist in every variant.

    The Samsonov gap is stepped over; any other skip ends the list early.
    """
    walks = [admissible_states(axial, variant=option) for option in FormulaVariant]
    states = []
    while len(states) < count:
        step = [next(walk) for walk in walks]
        skipped = [state for state in step if isinstance(state, SkippedState)]
        if any(not state.code.startswith("MissingState") for state in skipped):
            break
        if not skipped:
            states.append(step[0][0])
    return states


def _sort_key(level: EnergyLevel):
    n_rho, m, n_z = level.labels
    return (level.value.real, n_rho, m, n_z, level.value.imag)


def spectrum_table(
    radial: RadialModel,
    axial: AxialModel,
    ordering: AmbiguityOrdering,
    ranges: QuantumRanges,
    variant=FormulaVariant.PAPER,
) -> SpectrumResult:
    """Every level of the composite model in range, sorted by Re E then labels."""
    variant = FormulaVariant(variant)
    levels = []
    skipped = []

    for state in admissible_states(axial, ranges.nz_max, variant):
        if isinstance(state, SkippedState):
            skipped.append(state)
            continue
        n_z, kz2 = state
        for n_rho in range(ranges.nrho_min, ranges.nrho_max + 1):
            for m in range(-ranges.m_max, ranges.m_max + 1):
                try:
                    if radial.kind == "coulomb":
                        level = energy_coulomb(m, n_rho, kz2, ordering, variant, n_z=n_z)
                        levels.append(level)
                        if FLAG_COMPLEX_PAIR in level.flags:
                            levels.append(
                                energy_coulomb(
                                    m, n_rho, kz2, ordering, variant, n_z=n_z, conjugate=True
                                )
                            )
                    else:
                        levels.append(
                            energy_oscillator(m, n_rho, kz2, radial.a, ordering, variant, n_z=n_z)
                        )
                except StatePreconditionError as error:
                    _LOGGER.debug("Skipping %s: %s", error.code, error)
                    skipped.append(SkippedState(code=error.code, n_z=n_z, n_rho=n_rho, m=m))

    levels.sort(key=_sort_key)
    _LOGGER.debug(
        "Spectrum %s x %s: %d levels, %d skipped",
        radial.kind,
        axial.kind,
        len(levels),
        len(skipped),
    )
    return SpectrumResult(levels=levels, skipped=skipped)


class StatePreconditionError(PdmSpectraError):
    """A requested quantum state does not exist; code names the reason and the labels."""

    def __init__(
        self, message: str, n_z: int, n_rho: Optional[int] = None, m: Optional[int] = None
    ):
        super().__init__(message)
        self.n_z = n_z
        self.n_rho = n_rho
        self.m = m

    @property
    def code(self) -> str:
        labels = [f"n_z={self.n_z}"]
        if self.n_rho is not None:
            labels.append(f"n_rho={self.n_rho}")
        if self.m is not None:
            labels.append(f"m={self.m}")
        return f"{type(self).__name__}:{','.join(labels)}"


class BoundStateCountExceeded(StatePreconditionError):
    """Morse quantum number beyond the last bound state."""


class StateOutOfRange(StatePreconditionError):
    """Quantum number outside the model's admissible range."""


class MissingState(StatePreconditionError):
    """The Samsonov n_z=2 slot."""


class DivisionByZero(StatePreconditionError):
    """Coulombic energy evaluated at K_z^2 = 0."""
