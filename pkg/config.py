#!/usr/bin/env python3
"""
Settings for the paraconsistent quantum toolkit.

Defaults live here as module constants; a few of them can be overridden
through environment variables (see load_settings).
"""
import logging
import os
import sys
from dataclasses import dataclass

from errors import ConfigError

# Formula engine
DEFAULT_MAX_CLOSURE = 64

# Hilbert-space kernel
DEFAULT_MAX_DIM = 8
NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-9
DEGENERACY_TOL = 1e-8
SPECTRAL_TOL = 1e-8
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

# Powers
P_TRUTH_EPS = 1e-9
P_TRUTH_MATCH = 1e-6
POTENTIA_SUM_TOL = 1e-8

# Lattice
LATTICE_TOL = 1e-8

# Output
SIG_DIGITS = 12
SCHEMA_VERSION = 1

DEFAULT_DB_PATH = "data/experiments.db"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    max_closure: int = DEFAULT_MAX_CLOSURE
    max_dim: int = DEFAULT_MAX_DIM
    db_path: str = DEFAULT_DB_PATH
    log_level: str = "WARNING"


def _int_from_env(name, default, minimum):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def load_settings():
    """Read PAQS_* environment overrides on top of the defaults"""
    level = os.environ.get("PAQS_LOG_LEVEL", "WARNING").upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"PAQS_LOG_LEVEL is not a logging level: {level!r}")

    return Settings(
        max_closure=_int_from_env("PAQS_MAX_CLOSURE", DEFAULT_MAX_CLOSURE, 1),
        max_dim=_int_from_env("PAQS_MAX_DIM", DEFAULT_MAX_DIM, 2),
        db_path=os.environ.get("PAQS_DB_PATH", DEFAULT_DB_PATH),
        log_level=level,
    )


def setup_logging(level="WARNING"):
    """Diagnostics go to stderr so that stdout reports stay byte-stable"""
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
    )


def fmt_real(x):
    """Fixed 12-significant-digit rendering used by every report"""
    value = float(x)
    if value == 0.0:
        value = 0.0  # drop negative zero
    return f"{value:.{SIG_DIGITS}g}"


def round_sig(x):
    return float(fmt_real(x))
