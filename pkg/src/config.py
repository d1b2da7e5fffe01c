"""
Configuration for HodgeBound

Numerical tolerances and caps live in one frozen Settings record. Defaults
are fixed so acceptance targets are deterministic; a JSON file can override
any subset of them.
"""

import json
import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "HODGEBOUND_THREADS"

TOOL_VERSION = "1.0.0"


def _threads_from_env() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        threads = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r (not an integer)", THREADS_ENV_VAR, raw)
        return 1
    return max(threads, 1)


@dataclass(frozen=True)
class Settings:
    """
    Tolerances and caps shared by all modules.

    Relative tolerances are fractions of the quantity they control
    (eigenvalue, integral, weight scale, bound value).
    """

    # Model-ball eigensolver
    bisection_rtol: float = 1e-10
    series_start_fraction: float = 1e-6
    bracket_max_doublings: int = 60
    ode_rtol: float = 1e-12
    ode_atol: float = 1e-14
    quad_rtol: float = 1e-10
    bessel_rtol: float = 1e-12
    shooting_residual_tol: float = 1e-9
    shooting_max_refinements: int = 30
    # Spectra
    residual_tol: float = 1e-8
    kernel_rel: float = 1e-8
    zero_floor_rel: float = 1e-10
    zero_weight_rel: float = 1e-12
    dense_max_dim: int = 2000
    iterative_max_iter: int = 10000
    shift_rel: float = 1e-6
    multiplicity_gap_rel: float = 1e-6
    # Meshes
    exact_diameter_max_vertices: int = 5000
    # Reports
    report_rel_tol: float = 1e-8
    decomposition_rel_tol: float = 1e-9
    seed: int = 0
    threads: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_SETTINGS = Settings(threads=_threads_from_env())


def resolve(settings: Optional[Settings]) -> Settings:
    """Return `settings` or the module defaults."""
    return DEFAULT_SETTINGS if settings is None else settings


def load_settings(path: str, base: Optional[Settings] = None) -> Settings:
    """
    Load setting overrides from a JSON file.

    Args:
        path: Path to a JSON object mapping setting names to values
        base: Settings to override (defaults to DEFAULT_SETTINGS)

    Returns:
        New Settings with the overrides applied

    Raises:
        FileNotFoundError: If the file doesn't exist
        KeyError: If the file names an unknown setting
        ValueError: If a value has the wrong type or is not positive
        json.JSONDecodeError: If the file is not valid JSON

    Examples:
        >>> settings = load_settings("tolerances.json")
        >>> settings.residual_tol
        1e-09
    """
    settings_file = Path(path)

    if not settings_file.exists():
        raise FileNotFoundError(f"Settings file not found: {path}")

    with open(settings_file, "r") as f:
        overrides = json.load(f)

    if not isinstance(overrides, dict):
        raise ValueError(f"Invalid settings file: {path}. Must contain a JSON object.")

    base = resolve(base)
    known = {f.name for f in fields(Settings)}
    cleaned: Dict[str, Any] = {}
    for key, value in overrides.items():
        # Validate key
        if key not in known:
            raise KeyError(f"Unknown setting '{key}' in settings file")

        expected = int if getattr(base, key).__class__ is int else float
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"Invalid {key}: {value!r}. Must be a number.")
        if expected is int and not float(value).is_integer():
            raise ValueError(f"Invalid {key}: {value!r}. Must be an integer.")
        if key != "seed" and value <= 0:
            raise ValueError(f"Invalid {key}: {value!r}. Must be positive.")
        if key == "seed" and value < 0:
            raise ValueError(f"Invalid seed: {value!r}. Must be non-negative.")
        cleaned[key] = expected(value)

    logger.info("Loaded %d setting override(s) from %s", len(cleaned), path)
    return replace(base, **cleaned)
