"""model.py: Ordering algebra, quantum numbers, mass profile and model catalogs."""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, NamedTuple, Optional

import numpy as np

from .const import (
    _LOGGER,
    DERIVATIVE_STEP,
    VON_ROOS_SUM,
    VON_ROOS_TOLERANCE,
)

# Named ambiguity parameter sets
ORDERINGS_FILE = Path(__file__).parent / "orderings.json"


class FormulaVariant(str, Enum):
    """Which closed form to use where the printed formula and the 1D problem disagree."""

    PAPER = "paper"
    STANDARD = "standard"


@dataclass(frozen=True)
class AmbiguityOrdering:
    """The (alpha, beta, gamma) triple of the von Roos kinetic operator."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        total = self.alpha + self.beta + self.gamma
        if abs(total - VON_ROOS_SUM) > VON_ROOS_TOLERANCE:
            raise InvalidOrdering(
                f"alpha + beta + gamma = {total!r}, the von Roos constraint requires -1"
            )

    @classmethod
    def from_triple(cls, text: str) -> AmbiguityOrdering:
        """Parse 'alpha,beta,gamma'."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise InvalidOrdering(f"Expected three comma separated numbers, got '{text}'")
        try:
            alpha, beta, gamma = (float(p) for p in parts)
        except ValueError as error:
            raise InvalidOrdering(f"Not a numeric ordering triple: '{text}'") from error
        return cls(alpha, beta, gamma)

    @property
    def zeta(self) -> float:
        return zeta(self)

    @property
    def shift(self) -> float:
        return ordering_shift(self)

    @property
    def satisfies_heterojunction_continuity(self) -> bool:
        # continuity at abrupt heterojunctions forces alpha = gamma
        return self.alpha == self.gamma

    def swapped(self) -> AmbiguityOrdering:
        return AmbiguityOrdering(self.gamma, self.beta, self.alpha)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "zeta": self.zeta,
        }


def zeta(ordering: AmbiguityOrdering) -> float:
    """zeta = alpha(alpha-1) + gamma(gamma-1) - beta(beta+1)."""
    a, b, g = ordering.alpha, ordering.beta, ordering.gamma
    return a * (a - 1.0) + g * (g - 1.0) - b * (b + 1.0)


def ordering_shift(ordering: AmbiguityOrdering) -> float:
    """zeta - beta, the only combination through which an ordering enters the energies."""
    return zeta(ordering) - ordering.beta


def _load_presets() -> list[dict]:
    with Path.open(ORDERINGS_FILE, encoding="utf-8") as file:
        config = json.loads(file.read())

    return config["presets"]


def preset_orderings() -> list[tuple[str, AmbiguityOrdering]]:
    """The five named orderings, in the order they are usually quoted."""
    return [
        (entry["name"], AmbiguityOrdering(entry["alpha"], entry["beta"], entry["gamma"]))
        for entry in _load_presets()
    ]


def _normalize_name(name: str) -> str:
    name = name.strip().lower()
    for dash in ("–", "—", "_", " "):
        name = name.replace(dash, "-")
    return name.replace("-", "")


def ordering_by_name(name: str) -> AmbiguityOrdering:
    """Look up a preset by display name or key, ignoring case and dash style."""
    wanted = _normalize_name(name)
    for entry in _load_presets():
        if wanted in (_normalize_name(entry["key"]), _normalize_name(entry["name"])):
            return AmbiguityOrdering(entry["alpha"], entry["beta"], entry["gamma"])

    known = ", ".join(entry["key"] for entry in _load_presets())
    raise InvalidOrdering(f"Unknown ordering '{name}' (known: {known})")


def kphi2_from_energy(E: complex, m: int, ordering: AmbiguityOrdering) -> complex:
    """K_phi^2 = 2E + 2(zeta - beta - 1) - m^2."""
    return 2.0 * E + 2.0 * (ordering_shift(ordering) - 1.0) - m * m


def ell_from_kphi2(kphi2: complex) -> complex:
    """Principal root of 1 - K_phi^2; pure imaginary with Im >= 0 once K_phi^2 > 1."""
    if isinstance(kphi2, complex):
        return cmath.sqrt(1.0 - kphi2)
    return cmath.sqrt(complex(1.0 - kphi2, 0.0))


class QuantumNumbers(NamedTuple):
    n_rho: int
    m: int
    n_z: int


class SeparationConstants(NamedTuple):
    kphi2: complex
    ell: complex
    kz2: complex

    @classmethod
    def from_energy(
        cls, E: complex, m: int, kz2: complex, ordering: AmbiguityOrdering
    ) -> SeparationConstants:
        kphi2 = kphi2_from_energy(E, m, ordering)
        return cls(kphi2=kphi2, ell=ell_from_kphi2(kphi2), kz2=kz2)


def _as_result(values):
    values = np.asarray(values)
    if values.ndim == 0:
        return values.item()
    return values


def _central_first(fn, x, step=DERIVATIVE_STEP):
    return (fn(x + step) - fn(x - step)) / (2.0 * step)


def _central_second(fn, x, step=DERIVATIVE_STEP):
    return (fn(x + step) - 2.0 * fn(x) + fn(x - step)) / (step * step)


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class MassProfile:
    """Factorised mass M(rho, phi, z) = g(rho) f(phi) k(z).

    Derivative handles are optional; missing ones fall back to central
    differences with step DERIVATIVE_STEP.
    """

    g: Callable
    f: Callable = _one
    k: Callable = _one
    dg: Optional[Callable] = None
    d2g: Optional[Callable] = None
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None
    dk: Optional[Callable] = None
    d2k: Optional[Callable] = None
    name: str = field(default="custom", compare=False)

    @classmethod
    def canonical(cls) -> MassProfile:
        """M = rho^-2 with closed-form derivatives."""
        return cls(
            g=lambda rho: np.asarray(rho, dtype=float) ** -2,
            dg=lambda rho: -2.0 * np.asarray(rho, dtype=float) ** -3,
            d2g=lambda rho: 6.0 * np.asarray(rho, dtype=float) ** -4,
            df=_zero,
            d2f=_zero,
            dk=_zero,
            d2k=_zero,
            name="rho^-2",
        )

    def evaluate(self, rho, phi=0.0, z=0.0):
        return _as_result(self.g(rho) * self.f(phi) * self.k(z))

    def _derivatives(self, fn, d1, d2, x):
        first = d1(x) if d1 is not None else _central_first(fn, x)
        second = d2(x) if d2 is not None else _central_second(fn, x)
        value = fn(x)
        return first / value, second / value

    def rho_log_derivatives(self, rho):
        """(g'/g, g''/g) at rho."""
        return self._derivatives(self.g, self.dg, self.d2g, np.asarray(rho, dtype=float))

    def phi_log_derivatives(self, phi):
        """(f'/f, f''/f) at phi."""
        return self._derivatives(self.f, self.df, self.d2f, np.asarray(phi, dtype=float))

    def z_log_derivatives(self, z):
        """(k'/k, k''/k) at z."""
        return self._derivatives(self.k, self.dk, self.d2k, np.asarray(z, dtype=float))


@dataclass(frozen=True)
class RadialModel:
    """Tagged union over the radial potentials: coulomb (-2/rho) or oscillator (a^2 rho^2 / 4)."""

    kind: str
    a: Optional[float] = None

    def __post_init__(self):
        if self.kind == "coulomb":
            if self.a is not None:
                raise ModelParameterError("The Coulombic radial model takes no parameters")
        elif self.kind == "oscillator":
            if self.a is None or not self.a > 0:
                raise ModelParameterError(f"Oscillator requires a > 0, got a={self.a}")
        else:
            raise ModelParameterError(f"Unknown radial model '{self.kind}'")

    @classmethod
    def coulomb(cls) -> RadialModel:
        return cls("coulomb")

    @classmethod
    def oscillator(cls, a: float) -> RadialModel:
        return cls("oscillator", a=a)

    def potential(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.kind == "coulomb":
            return _as_result(-2.0 / rho)
        return _as_result(self.a * self.a * rho * rho / 4.0)

    def describe(self) -> dict:
        if self.kind == "coulomb":
            return {"kind": "coulomb"}
        return {"kind": "oscillator", "a": self.a}


# First admissible axial quantum number per model
NZ_START = {"well": 1, "morse": 0, "scarf2": 0, "samsonov": 1}


@dataclass(frozen=True)
class AxialModel:
    """Tagged union over the axial potentials.

    well(L): impenetrable walls at z=0 and z=L
    morse(D, eps): D (exp(-2 eps z) - 2 exp(-eps z))
    scarf2(A): PT-symmetric Scarf II
    samsonov(): PT-symmetric Samsonov on [-pi, pi]
    """

    kind: str
    L: Optional[float] = None
    D: Optional[float] = None
    eps: Optional[float] = None
    A: Optional[float] = None

    def __post_init__(self):
        required = {
            "well": ("L",),
            "morse": ("D", "eps"),
            "scarf2": ("A",),
            "samsonov": (),
        }
        if self.kind not in required:
            raise ModelParameterError(f"Unknown axial model '{self.kind}'")
        for name in ("L", "D", "eps", "A"):
            value = getattr(self, name)
            if name in required[self.kind]:
                if value is None or not value > 0:
                    raise ModelParameterError(
                        f"Axial model '{self.kind}' requires {name} > 0, got {value}"
                    )
            elif value is not None:
                raise ModelParameterError(f"Axial model '{self.kind}' takes no parameter {name}")

    @classmethod
    def well(cls, L: float) -> AxialModel:
        return cls("well", L=L)

    @classmethod
    def morse(cls, D: float, eps: float) -> AxialModel:
        return cls("morse", D=D, eps=eps)

    @classmethod
    def scarf2(cls, A: float) -> AxialModel:
        return cls("scarf2", A=A)

    @classmethod
    def samsonov(cls) -> AxialModel:
        return cls("samsonov")

    @property
    def nz_start(self) -> int:
        return NZ_START[self.kind]

    @property
    def domain(self) -> Optional[tuple[float, float]]:
        """Fixed box of the model, None for models on the whole line."""
        if self.kind == "well":
            return (0.0, self.L)
        if self.kind == "samsonov":
            return (-math.pi, math.pi)
        return None

    @property
    def is_pt_symmetric(self) -> bool:
        return self.kind in ("scarf2", "samsonov")

    def potential(self, z, variant: FormulaVariant = FormulaVariant.PAPER):
        z = np.asarray(z, dtype=float)
        if self.kind == "well":
            return _as_result(np.where((z > 0.0) & (z < self.L), 0.0, np.inf))
        if self.kind == "morse":
            return _as_result(
                self.D * (np.exp(-2.0 * self.eps * z) - 2.0 * np.exp(-self.eps * z))
            )
        if self.kind == "scarf2":
            cosh2 = np.cosh(z) ** 2
            return _as_result(
                -(3.0 + self.A * self.A) / (4.0 * cosh2) - 1j * self.A * np.sinh(z) / cosh2
            )
        seed = np.cos(z) + 2j * np.sin(z)
        if FormulaVariant(variant) is FormulaVariant.STANDARD:
            # Darboux partner of the box built on the seed u'' = -u
            return _as_result(-6.0 / (seed * seed))
        return _as_result(-1.0 / seed)

    def describe(self) -> dict:
        params = {name: getattr(self, name) for name in ("L", "D", "eps", "A")}
        return {"kind": self.kind, **{k: v for k, v in params.items() if v is not None}}


def radial_from_config(kind: str, a: Optional[float] = None) -> RadialModel:
    if kind == "coulomb":
        return RadialModel.coulomb()
    return RadialModel.oscillator(a)


def axial_from_config(kind: str, **params) -> AxialModel:
    wanted = {
        "well": ("L",),
        "morse": ("D", "eps"),
        "scarf2": ("A",),
        "samsonov": (),
    }.get(kind)
    if wanted is None:
        raise ModelParameterError(f"Unknown axial model '{kind}'")
    model = AxialModel(kind, **{name: params.get(name) for name in wanted})
    _LOGGER.debug("Axial model %s", model.describe())
    return model


class PdmSpectraError(Exception):
    """Base class for all errors raised by the package."""


class InvalidOrdering(PdmSpectraError):
    """Ambiguity parameters violate the von Roos constraint or are unknown."""


class ModelParameterError(PdmSpectraError):
    """A model parameter is outside its admissible range."""
