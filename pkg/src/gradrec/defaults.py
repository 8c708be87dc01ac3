"""Central defaults with a config-file override layer.

Resolution precedence everywhere: explicit flag/argument, then the JSON file
named by the ``GRADREC_CONFIG`` environment variable, then these built-ins.
Traversal defaults (lambda, rho, k_reg) were chosen by the parameter sweep in
``scripts/sweep_defaults.py`` on synthetic catalogs.
"""

from __future__ import annotations

import json
import os

from .errors import InvalidParameter, IoFailure
from .traversal import TraversalConfig

CONFIG_ENV_VAR = "GRADREC_CONFIG"

BUILTIN_DEFAULTS: dict = {
    "lambda": 0.1,
    "rho": 0.3,
    "k_reg": 10,
    "k_rec": 10,
    "max_steps": 40,
    "renormalize": True,
    "stop_stale_steps": 5,
    "snap_to_product": False,
    "class_m": 100,
    "class_n": 100,
    "epsilon": 1e-6,
    "intensity_n": 100,
    "window": 50,
    "min_peak": 10,
}


def load_defaults(path: str | None = None) -> dict:
    """Built-ins overlaid with the config file (explicit path wins over the
    environment variable). Unknown keys in the file are rejected to catch
    typos early."""
    merged = dict(BUILTIN_DEFAULTS)
    config_path = path or os.environ.get(CONFIG_ENV_VAR)
    if not config_path:
        return merged
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            overrides = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read config {config_path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"config {config_path!r} is not valid JSON: {exc}") from exc
    if not isinstance(overrides, dict):
        raise InvalidParameter(f"config {config_path!r} must hold a JSON object")
    unknown = sorted(set(overrides) - set(BUILTIN_DEFAULTS))
    if unknown:
        raise InvalidParameter(f"config {config_path!r} has unknown keys: {', '.join(unknown)}")
    for key, value in overrides.items():
        want = type(BUILTIN_DEFAULTS[key])
        ok = isinstance(value, bool) if want is bool else (
            isinstance(value, (int, float)) and not isinstance(value, bool)
            if want is float
            else isinstance(value, int) and not isinstance(value, bool)
        )
        if not ok:
            raise InvalidParameter(
                f"config {config_path!r}: {key} must be {want.__name__}, got {value!r}"
            )
    merged.update(overrides)
    return merged


def traversal_config(defaults: dict | None = None, **overrides) -> TraversalConfig:
    """Build a TraversalConfig from the defaults layer plus non-None overrides
    (keyed by TraversalConfig field names)."""
    d = defaults if defaults is not None else load_defaults()
    cfg = TraversalConfig(
        step_scale=d["lambda"],
        reg_weight=d["rho"],
        k_reg=d["k_reg"],
        k_rec=d["k_rec"],
        max_steps=d["max_steps"],
        renormalize=d["renormalize"],
        stop_stale_steps=d["stop_stale_steps"],
        snap_to_product=d["snap_to_product"],
    )
    return cfg.with_overrides(**overrides)
