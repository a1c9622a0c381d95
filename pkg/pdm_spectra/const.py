"""Constants for the PDM spectra package."""

import logging

DOMAIN = "pdm_spectra"
NAME = "PDM cylindrical spectra"
VERSION = "2026.10.18"

# Configuration
CONF_COMMAND = "command"
CONF_RADIAL = "radial"
CONF_AXIAL = "axial"
CONF_ORDERING = "ordering"
CONF_VARIANT = "variant"
CONF_FORMAT = "format"
CONF_OUT = "out"
CONF_TARGET = "target"
ENV_THREADS = "PDM_SPECTRA_THREADS"

COMMANDS = ["spectrum", "verify", "sweep"]
RADIAL_KINDS = ["coulomb", "oscillator"]
AXIAL_KINDS = ["well", "morse", "scarf2", "samsonov"]
VERIFY_TARGETS = ["radial", "axial", "composite"]
OUTPUT_FORMATS = ["json", "csv"]
SWEEP_AXES = ["L", "D", "eps", "A", "a", "ordering"]
LOG_LEVELS = ["debug", "info", "warning", "error"]

DEFAULT_ORDERING = "bendaniel-duke"
DEFAULT_VARIANT = "paper"
DEFAULT_NRHO_MAX = 1
DEFAULT_M_MAX = 1
DEFAULT_NZ_MAX = 2
DEFAULT_N_MAX = 3

# Exit codes
EXIT_OK = 0
EXIT_DEVIATION = 1
EXIT_CONFIG_ERROR = 2
EXIT_EMPTY_RESULT = 3

# Report schema
SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12

# Level flags
FLAG_REAL = "REAL"
FLAG_COMPLEX_PAIR = "COMPLEX_PAIR"
FLAG_NONNORMALIZABLE_SUSPECT = "NONNORMALIZABLE_SUSPECT"
FLAG_PAPER_VARIANT = "PAPER_VARIANT"
FLAG_STANDARD_VARIANT = "STANDARD_VARIANT"

# Ordering algebra
VON_ROOS_SUM = -1.0
VON_ROOS_TOLERANCE = 1e-12

# Oracle
MIN_GRID_POINTS = 16
MAX_DENSE_POINTS = 4000
RADIAL_REL_TOL = 1e-3
AXIAL_REAL_REL_TOL = 1e-3
AXIAL_COMPLEX_ABS_TOL = 1e-2
BOUNDARY_AMPLITUDE_TOL = 1e-10
RESIDUAL_RELATIVE_TOL = 1e-8
CONJUGATION_TOL = 1e-8
REAL_LEVEL_IMAG_TOL = 1e-6
CONVERGENCE_BAND = (3.6, 4.4)
COMPOSITE_CONVERGENCE_BAND = (3.5, 4.5)
SAMSONOV_GAP_VALUE = 1.0
SAMSONOV_GAP_WINDOW = 0.5
DERIVATIVE_STEP = 1e-5

_LOGGER = logging.getLogger(DOMAIN)

LOG_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"
LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}

STARTUP_MESSAGE = f"""
----------------------------------------------------------------------------
{NAME}
Version: {VERSION}
Domain: {DOMAIN}
----------------------------------------------------------------------------
"""
