"""Configuration helpers and defaults for the project.

Provides solver/metric defaults shared across packages, the parser for
flat ``key=value`` experiment files used by the CLI, and typed
environment readers for the MCP server settings (PROJECT_ROOT,
RESULTS_DIR, MAX_SERVER_INTERVALS).
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, List

from core.errors import ConfigError


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw.strip())
    except ValueError:
        return default


# Solver defaults
DEFAULT_KKT_TOL = 1e-7
DEFAULT_MAX_OUTER_ITERS = 60
DEFAULT_MAX_INNER_ITERS = 400
DEFAULT_PENALTY_INIT = 10.0
DEFAULT_PENALTY_GROWTH = 10.0
MAX_PENALTY = 1e8

# Metrics / artifacts
DEFAULT_SAMPLES_PER_INTERVAL = 64
DEFAULT_TRAJECTORY_SAMPLES_PER_INTERVAL = 10
CSV_SIGNIFICANT_DIGITS = 17

# Experiment file keys accepted by the CLI
CONFIG_KEYS = frozenset(
    {
        "problem",
        "method",
        "methods",
        "hs_form",
        "N",
        "N_list",
        "fair",
        "warm_start",
        "out",
        "kkt_tol",
        "max_outer_iters",
        "max_inner_iters",
        "penalty_init",
        "penalty_growth",
        "samples_per_interval",
        "timing",
    }
)


def read_config_file(path: str | Path) -> Dict[str, str]:
    """Parse a flat ``key=value`` experiment file.

    Blank lines and ``#`` comments are ignored. Keys must belong to
    CONFIG_KEYS; values are returned as stripped strings and coerced
    later with the ``parse_*`` helpers.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file: {p}") from e

    values: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{p}:{lineno}: expected key=value")
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{p}:{lineno}: unknown key '{key}'")
        values[key] = value
    return values


def parse_bool(key: str, raw: str) -> bool:
    s = raw.strip().lower()
    if s in {"1", "true", "yes", "y", "on"}:
        return True
    if s in {"0", "false", "no", "n", "off"}:
        return False
    raise ConfigError(f"{key}: expected a boolean, got '{raw}'")


def parse_int(key: str, raw: str) -> int:
    try:
        return int(raw.strip())
    except ValueError as e:
        raise ConfigError(f"{key}: expected an integer, got '{raw}'") from e


def parse_float(key: str, raw: str) -> float:
    try:
        return float(raw.strip())
    except ValueError as e:
        raise ConfigError(f"{key}: expected a number, got '{raw}'") from e


def parse_list(key: str, raw: str) -> List[str]:
    # comma separated, empty items dropped
    items = [item.strip() for item in raw.split(",")]
    items = [item for item in items if item]
    if not items:
        raise ConfigError(f"{key}: expected a comma separated list")
    return items


# MCP server settings
PROJECT_ROOT = Path(os.environ.get("PROJECT_ROOT", ".")).resolve()
RESULTS_DIR = os.environ.get("RESULTS_DIR", "results").strip()
MAX_SERVER_INTERVALS = _env_int("MAX_SERVER_INTERVALS", 400)
