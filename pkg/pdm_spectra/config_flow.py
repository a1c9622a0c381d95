"""config_flow.py: Run configuration from a JSON config file and command-line flags."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import voluptuous as vol

from .const import (
    _LOGGER,
    AXIAL_KINDS,
    COMMANDS,
    CONF_AXIAL,
    CONF_COMMAND,
    CONF_FORMAT,
    CONF_ORDERING,
    CONF_OUT,
    CONF_RADIAL,
    CONF_TARGET,
    CONF_VARIANT,
    DEFAULT_M_MAX,
    DEFAULT_N_MAX,
    DEFAULT_NRHO_MAX,
    DEFAULT_NZ_MAX,
    DEFAULT_ORDERING,
    DEFAULT_VARIANT,
    ENV_THREADS,
    LOG_LEVELS,
    MIN_GRID_POINTS,
    OUTPUT_FORMATS,
    RADIAL_KINDS,
    SWEEP_AXES,
    VERIFY_TARGETS,
)
from .model import (
    AmbiguityOrdering,
    AxialModel,
    FormulaVariant,
    InvalidOrdering,
    ModelParameterError,
    PdmSpectraError,
    RadialModel,
    axial_from_config,
    ordering_by_name,
    preset_orderings,
    radial_from_config,
)
from .spectra import QuantumRanges

TRANSLATIONS = Path(__file__).parent / "translations" / "en.json"

# Which model each sweep axis belongs to
AXIS_OWNERS = {"L": "well", "D": "morse", "eps": "morse", "A": "scarf2", "a": "oscillator"}
AXIAL_PARAMS = ("L", "D", "eps", "A")

NON_NEGATIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=0))
POSITIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))

# Step 1 reads the config file, step 2 overlays the explicitly given flags.
# Both use the same schema; defaults are applied once on the merged result.
OPTIONS_SCHEMA = {
    vol.Optional(CONF_COMMAND): vol.In(COMMANDS),
    vol.Optional(CONF_RADIAL): vol.In(RADIAL_KINDS),
    vol.Optional("a"): POSITIVE_FLOAT,
    vol.Optional(CONF_AXIAL): vol.In(AXIAL_KINDS),
    vol.Optional("L"): POSITIVE_FLOAT,
    vol.Optional("D"): POSITIVE_FLOAT,
    vol.Optional("eps"): POSITIVE_FLOAT,
    vol.Optional("A"): POSITIVE_FLOAT,
    vol.Optional(CONF_ORDERING): vol.Coerce(str),
    vol.Optional(CONF_VARIANT): vol.All(vol.Lower, vol.In([v.value for v in FormulaVariant])),
    vol.Optional("nrho_min"): NON_NEGATIVE_INT,
    vol.Optional("nrho_max"): NON_NEGATIVE_INT,
    vol.Optional("m_max"): NON_NEGATIVE_INT,
    vol.Optional("nz_max"): NON_NEGATIVE_INT,
    vol.Optional("n_max"): vol.All(vol.Coerce(int), vol.Range(min=1)),
    vol.Optional("ell"): vol.Coerce(float),
    vol.Optional("n_rho"): NON_NEGATIVE_INT,
    vol.Optional("m"): vol.Coerce(int),
    vol.Optional("n_z"): NON_NEGATIVE_INT,
    vol.Optional(CONF_TARGET): vol.In(VERIFY_TARGETS),
    vol.Optional("grid_points"): vol.All(vol.Coerce(int), vol.Range(min=MIN_GRID_POINTS)),
    vol.Optional("x_min"): vol.Coerce(float),
    vol.Optional("x_max"): vol.Coerce(float),
    vol.Optional(CONF_FORMAT): vol.All(vol.Lower, vol.In(OUTPUT_FORMATS)),
    vol.Optional(CONF_OUT): vol.Coerce(str),
    vol.Optional("sweep"): vol.In(SWEEP_AXES),
    vol.Optional("values"): vol.Any([vol.Coerce(str)], vol.Coerce(str)),
    vol.Optional("range"): vol.Coerce(str),
    vol.Optional("log_level"): vol.All(vol.Lower, vol.In(LOG_LEVELS)),
}
STEP_CONFIG_FILE_SCHEMA = vol.Schema(OPTIONS_SCHEMA)
STEP_FLAGS_SCHEMA = vol.Schema(OPTIONS_SCHEMA, extra=vol.REMOVE_EXTRA)

THREADS_SCHEMA = vol.All(vol.Coerce(int), vol.Range(min=1))


@dataclass(frozen=True)
class RunConfig:
    """One validated command invocation."""

    command: str
    radial: Optional[RadialModel]
    axial: Optional[AxialModel]
    ordering: AmbiguityOrdering
    variant: FormulaVariant
    ranges: QuantumRanges
    target: Optional[str] = None
    ell: Optional[float] = None
    n_max: int = DEFAULT_N_MAX
    state: tuple = (0, 0, 1)
    grid_points: Optional[int] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    output_format: str = "json"
    out: Optional[str] = None
    sweep_axis: Optional[str] = None
    sweep_values: tuple = ()
    threads: int = 1
    log_level: str = "warning"


def error_message(key: str) -> str:
    with Path.open(TRANSLATIONS, encoding="utf-8") as file:
        errors = json.loads(file.read())["config"]["error"]
    return errors.get(key, errors["unknown"])


def step_config_file(path: Optional[str]) -> dict[str, Any]:
    """Step 1: the optional JSON config file."""
    if not path:
        return {}
    try:
        with Path.open(Path(path), encoding="utf-8") as file:
            data = json.loads(file.read())
    except (OSError, ValueError) as e:
        raise ConfigError("invalid_config_file", f"{path}: {e}") from e
    try:
        return STEP_CONFIG_FILE_SCHEMA(data)
    except vol.Invalid as e:
        raise ConfigError("invalid_option", f"{path}: {e}") from e


def step_flags(flags: dict[str, Any]) -> dict[str, Any]:
    """Step 2: flags that were given on the command line (None means not given)."""
    given = {key: value for key, value in flags.items() if value is not None}
    try:
        return STEP_FLAGS_SCHEMA(given)
    except vol.Invalid as e:
        raise ConfigError("invalid_option", str(e)) from e


def resolve_ordering(text: str) -> AmbiguityOrdering:
    """Preset name or explicit alpha,beta,gamma."""
    if "," in text:
        return AmbiguityOrdering.from_triple(text)
    return ordering_by_name(text)


def _threads() -> int:
    value = os.environ.get(ENV_THREADS)
    if value is None:
        return os.cpu_count() or 1
    try:
        return THREADS_SCHEMA(value)
    except vol.Invalid as e:
        raise ConfigError("invalid_threads", f"{ENV_THREADS}={value}") from e


def _arithmetic_range(text: str) -> list[float]:
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError as e:
        raise ConfigError("invalid_option", f"range '{text}' is not start:stop:step") from e
    if not step > 0:
        raise ConfigError("invalid_option", f"range step must be positive, got {step}")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(max(count, 0))]


def _sweep_values(data: dict[str, Any]) -> tuple:
    axis = data["sweep"]
    values = data.get("values")
    if axis == "ordering":
        if values is None:
            return tuple(name for name, _ in preset_orderings())
        names = values if isinstance(values, list) else values.split(";")
        return tuple(name.strip() for name in names if name.strip())

    if "range" in data:
        return tuple(_arithmetic_range(data["range"]))
    if values is None:
        return ()
    items = values if isinstance(values, list) else values.split(",")
    try:
        return tuple(float(item) for item in items if str(item).strip())
    except ValueError as e:
        raise ConfigError("invalid_option", f"sweep values {values}") from e


def _models(data: dict[str, Any]) -> tuple[Optional[RadialModel], Optional[AxialModel]]:
    radial = axial = None
    try:
        if CONF_RADIAL in data:
            radial = radial_from_config(data[CONF_RADIAL], data.get("a"))
        if CONF_AXIAL in data:
            axial = axial_from_config(
                data[CONF_AXIAL], **{name: data.get(name) for name in AXIAL_PARAMS}
            )
    except ModelParameterError as e:
        raise ConfigError("invalid_model", str(e)) from e
    return radial, axial


def _require_models(command: str, target: Optional[str], radial, axial):
    needs_radial = command in ("spectrum", "sweep") or target in ("radial", "composite")
    needs_axial = command in ("spectrum", "sweep") or target in ("axial", "composite")
    if needs_radial and radial is None:
        raise ConfigError("missing_model", "--radial is required")
    if needs_axial and axial is None:
        raise ConfigError("missing_model", "--axial is required")


def build_run_config(flags: dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """Merge config file and flags (flags win) and validate the result."""
    data = {**step_config_file(config_path), **step_flags(flags)}
    _LOGGER.debug("Merged run configuration: %s", data)

    command = data.get(CONF_COMMAND)
    if command is None:
        raise ConfigError("missing_command", "")
    target = data.get(CONF_TARGET)
    if command == "verify" and target is None:
        raise ConfigError("missing_target", "")

    try:
        ordering = resolve_ordering(data.get(CONF_ORDERING, DEFAULT_ORDERING))
    except InvalidOrdering as e:
        raise ConfigError("invalid_ordering", str(e)) from e

    radial, axial = _models(data)
    _require_models(command, target, radial, axial)

    sweep_axis = None
    sweep_values: tuple = ()
    if command == "sweep":
        sweep_axis = data.get("sweep")
        if sweep_axis is None:
            raise ConfigError("invalid_option", "sweep needs --sweep <axis>")
        owner = AXIS_OWNERS.get(sweep_axis)
        if owner is not None and owner not in (radial.kind, axial.kind):
            raise ConfigError(
                "sweep_axis_mismatch",
                f"{sweep_axis} belongs to {owner}, not {radial.kind} x {axial.kind}",
            )
        sweep_values = _sweep_values(data)
        if not sweep_values:
            raise ConfigError("empty_sweep", "")
        if sweep_axis == "ordering":
            for name in sweep_values:
                try:
                    resolve_ordering(name)
                except InvalidOrdering as e:
                    raise ConfigError("invalid_ordering", str(e)) from e

    return RunConfig(
        command=command,
        radial=radial,
        axial=axial,
        ordering=ordering,
        variant=FormulaVariant(data.get(CONF_VARIANT, DEFAULT_VARIANT)),
        ranges=QuantumRanges(
            nrho_max=data.get("nrho_max", DEFAULT_NRHO_MAX),
            m_max=data.get("m_max", DEFAULT_M_MAX),
            nz_max=data.get("nz_max", DEFAULT_NZ_MAX),
            nrho_min=data.get("nrho_min", 0),
        ),
        target=target,
        ell=data.get("ell"),
        n_max=data.get("n_max", DEFAULT_N_MAX),
        state=(
            data.get("n_rho", 0),
            data.get("m", 0),
            data.get("n_z", axial.nz_start if axial else 0),
        ),
        grid_points=data.get("grid_points"),
        x_min=data.get("x_min"),
        x_max=data.get("x_max"),
        output_format=data.get(CONF_FORMAT, "json"),
        out=data.get(CONF_OUT),
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        threads=_threads() if command == "sweep" else 1,
        log_level=data.get("log_level", "warning"),
    )


class ConfigError(PdmSpectraError):
    """Invalid run configuration; key selects the message in translations/en.json."""

    def __init__(self, key: str, detail: str = ""):
        message = error_message(key)
        super().__init__(f"{message}: {detail}" if detail else message)
        self.key = key
