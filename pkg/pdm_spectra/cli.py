"""cli.py: Command line for spectrum tables, verification reports and parameter sweeps."""
from __future__ import annotations

import argparse
import dataclasses
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import colorlog

from .composite import default_composite_grids, verify_composite
from .config_flow import ConfigError, RunConfig, build_run_config, resolve_ordering
from .const import (
    _LOGGER,
    AXIAL_KINDS,
    COMMANDS,
    EXIT_CONFIG_ERROR,
    EXIT_DEVIATION,
    EXIT_EMPTY_RESULT,
    EXIT_OK,
    LOG_COLORS,
    LOG_FORMAT,
    LOG_LEVELS,
    OUTPUT_FORMATS,
    RADIAL_KINDS,
    STARTUP_MESSAGE,
    SWEEP_AXES,
    VERIFY_TARGETS,
)
from .model import InvalidOrdering, ModelParameterError, PdmSpectraError, QuantumNumbers
from .oracle import (
    Discretization,
    DomainMismatch,
    default_axial_grid,
    default_radial_grid,
    verify_axial,
    verify_radial,
)
from .report import (
    dumps,
    ordering_block,
    spectrum_csv,
    spectrum_document,
    sweep_csv,
    sweep_document,
    verification_csv,
    verification_document,
    write_text,
)
from .spectra import spectrum_table

# Radial index used by verify --target radial when --ell is not given
DEFAULT_ELL = {"coulomb": 0.5, "oscillator": 1.0}


def setup_logging(level: str = "warning") -> None:
    handler = colorlog.StreamHandler()
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT, log_colors=LOG_COLORS))
    _LOGGER.handlers = [handler]
    _LOGGER.setLevel(level.upper())
    _LOGGER.propagate = False


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdm-spectra",
        description="Exact spectra of position-dependent-mass cylindrical models",
    )
    # Values stay strings here; the config flow coerces and validates them
    parser.add_argument("command", nargs="?", help=f"one of {', '.join(COMMANDS)}")
    parser.add_argument("--config", help="JSON run configuration; flags override it")
    parser.add_argument("--log-level", help="debug, info, warning or error")
    parser.add_argument("--radial", help=" or ".join(RADIAL_KINDS))
    parser.add_argument("--a", help="oscillator frequency parameter")
    parser.add_argument("--axial", help=", ".join(AXIAL_KINDS))
    parser.add_argument("--L", help="infinite well width")
    parser.add_argument("--D", help="Morse depth")
    parser.add_argument("--eps", help="Morse range parameter")
    parser.add_argument("--A", help="Scarf II strength")
    parser.add_argument("--ordering", help="preset name or alpha,beta,gamma")
    parser.add_argument("--variant", help="paper or standard")
    parser.add_argument("--nrho-min")
    parser.add_argument("--nrho-max")
    parser.add_argument("--m-max")
    parser.add_argument("--nz-max")
    parser.add_argument("--target", help=", ".join(VERIFY_TARGETS))
    parser.add_argument("--ell", help="radial index for --target radial")
    parser.add_argument("--n-max", help="number of levels to verify")
    parser.add_argument("--n-rho", help="composite state")
    parser.add_argument("--m", help="composite state")
    parser.add_argument("--n-z", help="composite state")
    parser.add_argument("--grid-points")
    parser.add_argument("--x-min")
    parser.add_argument("--x-max")
    parser.add_argument("--format", help=" or ".join(OUTPUT_FORMATS))
    parser.add_argument("--out", help="output path, stdout when omitted")
    parser.add_argument("--sweep", help=", ".join(SWEEP_AXES))
    parser.add_argument("--values", help="v1,v2,... (orderings separated by ;)")
    parser.add_argument("--range", help="start:stop:step")
    return parser


def _emit(document: dict, cfg: RunConfig, to_csv) -> None:
    text = to_csv(document) if cfg.output_format == "csv" else dumps(document)
    write_text(text, cfg.out)


def cmd_spectrum(cfg: RunConfig) -> int:
    result = spectrum_table(cfg.radial, cfg.axial, cfg.ordering, cfg.ranges, cfg.variant)
    document = spectrum_document(result, cfg.radial, cfg.axial, cfg.ordering, cfg.variant)
    _emit(document, cfg, spectrum_csv)
    if not result.levels:
        _LOGGER.warning("No admissible states in range (%d skipped)", len(result.skipped))
        return EXIT_EMPTY_RESULT
    return EXIT_OK


def _grid(default: Discretization, cfg: RunConfig) -> Discretization:
    return Discretization(
        default.x_min if cfg.x_min is None else cfg.x_min,
        default.x_max if cfg.x_max is None else cfg.x_max,
        cfg.grid_points or default.n_points,
    )


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.target == "radial":
        ell = DEFAULT_ELL[cfg.radial.kind] if cfg.ell is None else cfg.ell
        disc = _grid(default_radial_grid(cfg.radial), cfg)
        report = verify_radial(cfg.radial, ell, cfg.n_max, disc, cfg.variant)
    elif cfg.target == "axial":
        disc = _grid(default_axial_grid(cfg.axial), cfg)
        report = verify_axial(cfg.axial, cfg.n_max, disc, cfg.variant)
    else:
        rho_disc, z_disc = default_composite_grids(cfg.radial, cfg.axial)
        report = verify_composite(
            cfg.radial,
            cfg.axial,
            cfg.ordering,
            QuantumNumbers(*cfg.state),
            cfg.variant,
            rho_disc=_grid(rho_disc, cfg),
            z_disc=z_disc,
        )

    _emit(verification_document(report), cfg, verification_csv)
    if report.passed:
        _LOGGER.info("Verification of the %s problem passed", cfg.target)
        return EXIT_OK
    _LOGGER.warning("Verification of the %s problem deviates beyond tolerance", cfg.target)
    return EXIT_DEVIATION


def _sweep_point(cfg: RunConfig, value) -> dict:
    radial, axial, ordering = cfg.radial, cfg.axial, cfg.ordering
    try:
        if cfg.sweep_axis == "ordering":
            ordering = resolve_ordering(value)
        elif cfg.sweep_axis == "a":
            radial = dataclasses.replace(radial, a=value)
        else:
            axial = dataclasses.replace(axial, **{cfg.sweep_axis: value})
        result = spectrum_table(radial, axial, ordering, cfg.ranges, cfg.variant)
    except PdmSpectraError as e:
        _LOGGER.warning("Sweep point %s=%s failed: %s", cfg.sweep_axis, value, e)
        return {"value": value, "error": str(e)}

    document = spectrum_document(result, radial, axial, ordering, cfg.variant)
    return {
        "value": value,
        "ordering": ordering_block(ordering),
        "levels": document["levels"],
        "skipped": document["skipped"],
    }


def cmd_sweep(cfg: RunConfig) -> int:
    with ThreadPoolExecutor(max_workers=cfg.threads) as executor:
        points = list(executor.map(lambda value: _sweep_point(cfg, value), cfg.sweep_values))
    if cfg.sweep_axis != "ordering":
        points.sort(key=lambda point: point["value"])

    document = sweep_document(cfg.sweep_axis, points, cfg.radial, cfg.axial, cfg.variant)
    _emit(document, cfg, sweep_csv)
    if not any(point.get("levels") for point in points):
        _LOGGER.warning("The sweep produced no levels")
        return EXIT_EMPTY_RESULT
    return EXIT_OK


COMMAND_HANDLERS = {"spectrum": cmd_spectrum, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {key: value for key, value in vars(args).items() if key != "config"}
    setup_logging(args.log_level if args.log_level in LOG_LEVELS else "warning")
    _LOGGER.debug(STARTUP_MESSAGE)

    try:
        cfg = build_run_config(flags, args.config)
    except ConfigError as e:
        _LOGGER.error("%s", e)
        return EXIT_CONFIG_ERROR
    setup_logging(cfg.log_level)

    try:
        return COMMAND_HANDLERS[cfg.command](cfg)
    except (ModelParameterError, DomainMismatch, InvalidOrdering) as e:
        _LOGGER.error("%s", e)
        return EXIT_CONFIG_ERROR
    except PdmSpectraError as e:
        _LOGGER.error("%s", e)
        return EXIT_DEVIATION
