"""The PDM cylindrical spectra package."""
from __future__ import annotations

from .const import VERSION
from .model import (
    AmbiguityOrdering,
    AxialModel,
    FormulaVariant,
    MassProfile,
    QuantumNumbers,
    RadialModel,
    ordering_by_name,
    preset_orderings,
)
from .spectra import QuantumRanges, spectrum_table

__version__ = VERSION

__all__ = [
    "AmbiguityOrdering",
    "AxialModel",
    "FormulaVariant",
    "MassProfile",
    "QuantumNumbers",
    "QuantumRanges",
    "RadialModel",
    "ordering_by_name",
    "preset_orderings",
    "spectrum_table",
]
