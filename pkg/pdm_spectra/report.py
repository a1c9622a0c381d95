"""report.py: JSON and CSV artifacts for spectra, sweeps and verification reports."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Optional

from .const import SCHEMA_VERSION, SIGNIFICANT_DIGITS
from .model import AmbiguityOrdering, AxialModel, FormulaVariant, RadialModel
from .oracle import VerificationReport
from .spectra import EnergyLevel, SkippedState, SpectrumResult

LEVEL_COLUMNS = ["n_rho", "m", "n_z", "E_re", "E_im", "kz2_re", "kz2_im", "flags"]


def fmt(value) -> float:
    """Round to the report precision; also turns -0.0 into 0.0."""
    return float(f"{float(value):.{SIGNIFICANT_DIGITS}g}") + 0.0


def _clean(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, complex):
        return {"re": fmt(value.real), "im": fmt(value.imag)}
    if isinstance(value, float):
        return fmt(value)
    if isinstance(value, dict):
        return {key: _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return str(value)


def model_block(radial: Optional[RadialModel], axial: Optional[AxialModel]) -> dict:
    block = {}
    if radial is not None:
        block["radial"] = _clean(radial.describe())
    if axial is not None:
        block["axial"] = _clean(axial.describe())
    return block


def ordering_block(ordering: AmbiguityOrdering) -> dict:
    return _clean(ordering.as_dict())


def level_row(level: EnergyLevel) -> dict:
    n_rho, m, n_z = level.labels
    value = complex(level.value)
    kz2 = complex(level.kz2)
    return {
        "n_rho": n_rho,
        "m": m,
        "n_z": n_z,
        "E_re": fmt(value.real),
        "E_im": fmt(value.imag),
        "kz2_re": fmt(kz2.real),
        "kz2_im": fmt(kz2.imag),
        "flags": sorted(level.flags),
    }


def skipped_row(state: SkippedState) -> dict:
    return {key: value for key, value in state._asdict().items() if value is not None}


def spectrum_document(
    result: SpectrumResult,
    radial: RadialModel,
    axial: AxialModel,
    ordering: AmbiguityOrdering,
    variant: FormulaVariant,
) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "model": model_block(radial, axial),
        "ordering": ordering_block(ordering),
        "variant": FormulaVariant(variant).value,
        "levels": [level_row(level) for level in result.levels],
        "skipped": [skipped_row(state) for state in result.skipped],
    }


def sweep_document(
    axis: str,
    points: list[dict],
    radial: RadialModel,
    axial: AxialModel,
    variant: FormulaVariant,
) -> dict:
    """points: dicts with value, ordering block, levels, skipped and optionally error."""
    return {
        "schema": SCHEMA_VERSION,
        "sweep": axis,
        "model": model_block(radial, axial),
        "variant": FormulaVariant(variant).value,
        "points": _clean(points),
    }


def _comparison_rows(report: VerificationReport, variant: FormulaVariant) -> list[dict]:
    rows = []
    labels = report.labels
    deviations = report.deviations(variant)
    column = 1 if report.relative else 0
    for label, value, numeric, deviation in zip(
        labels, report.analytic.get(variant, []), report.matched(variant), deviations
    ):
        rows.append(
            {
                "label": label,
                "analytic": value,
                "numeric": numeric,
                "abs_dev": deviation[0],
                "rel_dev": deviation[1],
                "pass": deviation[column] <= report.tolerance,
            }
        )
    return rows


def verification_document(report: VerificationReport) -> dict:
    variants = {}
    for variant in FormulaVariant:
        if variant in report.analytic:
            variants[variant.value] = {
                "passed": report.variant_passes(variant),
                "rows": _comparison_rows(report, variant),
            }
    return _clean(
        {
            "schema": SCHEMA_VERSION,
            "target": report.target,
            "model": report.model,
            "grid": report.grid,
            "variant": report.variant.value,
            "passed": report.passed,
            "tolerance": {"value": report.tolerance, "relative": report.relative},
            "variants": variants,
            "convergence": report.convergence,
            "convergence_band": report.convergence_band,
            "unmatched": report.unmatched,
            "neighbourhood": report.neighbourhood,
            "warnings": report.warnings,
            "details": report.details,
        }
    )


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def level_csv(rows: list[dict], leading: Optional[list[str]] = None) -> str:
    leading = leading or []
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(leading + LEVEL_COLUMNS)
    for row in rows:
        writer.writerow(
            [row[key] for key in leading]
            + [row[key] for key in LEVEL_COLUMNS[:-1]]
            + ["|".join(row["flags"])]
        )
    return buffer.getvalue()


def spectrum_csv(document: dict) -> str:
    return level_csv(document["levels"])


def sweep_csv(document: dict) -> str:
    axis = document["sweep"]
    rows = [
        {axis: point["value"], **level}
        for point in document["points"]
        for level in point.get("levels", [])
    ]
    return level_csv(rows, leading=[axis])


def verification_csv(document: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["variant", "label", "analytic", "numeric", "abs_dev", "rel_dev", "pass"])
    for variant, block in document["variants"].items():
        for row in block["rows"]:
            writer.writerow(
                [variant]
                + [json.dumps(row[key]) for key in ("label", "analytic", "numeric")]
                + [row["abs_dev"], row["rel_dev"], row["pass"]]
            )
    return buffer.getvalue()


def write_text(text: str, out: Optional[str]) -> None:
    """Write to the path, or to stdout when no path is given."""
    if out is None:
        print(text, end="")
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with Path.open(path, "w", encoding="utf-8", newline="") as file:
        file.write(text)
