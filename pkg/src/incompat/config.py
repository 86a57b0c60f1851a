"""Solver settings from a JSON configuration file.

The file is looked up at ``$XDG_CONFIG_HOME/incompat/config.json`` (falling
back to ``~/.config/incompat/config.json``) unless a path is given
explicitly.  Recognized keys: ``gap_tol``, ``res_tol``, ``max_iters``.
"""
import json
import os
from pathlib import Path

from .errors import ParseError
from .sdp import Settings

KEYS = {"gap_tol": float, "res_tol": float, "max_iters": int}


def default_config_path() -> Path:
    base = os.environ.get("XDG_CONFIG_HOME") or os.path.join(os.path.expanduser("~"), ".config")
    return Path(base) / "incompat" / "config.json"


def load_settings(path=None, overrides=None) -> Settings:
    """Settings from defaults, then the config file, then ``overrides`` (None values ignored)."""
    values = {}
    explicit = path is not None
    path = Path(path) if explicit else default_config_path()
    if path.is_file():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"{path}: line {exc.lineno}") from None
        if not isinstance(data, dict):
            raise ParseError("configuration must be a JSON object", str(path))
        for key, val in data.items():
            if key not in KEYS:
                raise ParseError("unknown setting", f"{path}: {key}")
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ParseError("must be a number", f"{path}: {key}")
            values[key] = KEYS[key](val)
    elif explicit:
        raise ParseError("configuration file not found", str(path))
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = KEYS[key](val)
    for key in ("gap_tol", "res_tol"):
        if key in values and not values[key] > 0:
            raise ParseError("must be positive", key)
    if "max_iters" in values and values["max_iters"] < 1:
        raise ParseError("must be at least 1", "max_iters")
    return Settings(**values)
