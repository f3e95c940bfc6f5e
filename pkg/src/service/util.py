from functools import lru_cache
from pathlib import Path
from typing import Optional
import json
import logging
import os

from src.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

MAX_TOLERANCE = 1e-3

_DEFAULTS = {
    "Tolerance": 1e-9,
    "MaxDimension": 4096,
    "BatchWorkers": 4,
}


def get_config_path() -> Path:
    """Return the config file: HIERQ_CONFIG when set, else config.json at the project root."""
    override = os.environ.get("HIERQ_CONFIG")
    if override:
        return Path(override)
    return Path(__file__).resolve().parent.parent.parent / "config.json"


@lru_cache(maxsize=1)
def _load_config() -> dict:
    """Load config once and cache. HIERQ_TOLERANCE overrides the configured Tolerance."""
    try:
        with open(get_config_path()) as f:
            config = json.load(f)
    except FileNotFoundError:
        config = {}
    for key, default in _DEFAULTS.items():
        if key not in config:
            config[key] = default
    env_tol = os.environ.get("HIERQ_TOLERANCE", "").strip()
    if env_tol:
        try:
            config["Tolerance"] = float(env_tol)
        except ValueError:
            raise ValidationError(f"HIERQ_TOLERANCE is not a number: '{env_tol}'")
    return config


def resolve_tolerance(value: Optional[float] = None) -> float:
    """Explicit value if given, else the configured default; must lie in (0, 1e-3]."""
    tol = float(value) if value is not None else float(_load_config()["Tolerance"])
    if not (0.0 < tol <= MAX_TOLERANCE):
        raise ValidationError(f"Tolerance must be in (0, {MAX_TOLERANCE}], got {tol!r}")
    return tol


def max_dimension() -> int:
    return int(_load_config()["MaxDimension"])


def batch_workers() -> int:
    return max(1, int(_load_config()["BatchWorkers"]))


def clean_zero(value: float) -> float:
    """Map -0.0 to 0.0 so canonical output never depends on the sign of zero."""
    return float(value) + 0.0
