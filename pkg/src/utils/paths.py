"""
Output base and run defaults: single source for where solver output goes.

Reads config/config.json (output_base, log_level, train) when present;
otherwise uses built-in defaults. Command-line flags override both.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict

# Fallback when config/config.json is missing or has no output_base
_DEFAULT_OUTPUT_BASE = Path("out")
_DEFAULT_LOG_LEVEL = "INFO"


def _project_root() -> Path:
    """Project root (fibonacci-fde-solver/)."""
    return Path(__file__).resolve().parent.parent.parent


def load_config(cfg_path: Path | None = None) -> Dict[str, Any]:
    """
    Return config/config.json as a dict.

    Missing, unreadable or malformed files give an empty dict.
    """
    cfg_path = cfg_path or _project_root() / "config" / "config.json"
    if not cfg_path.exists():
        return {}
    try:
        with open(cfg_path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError):
        return {}
    return data if isinstance(data, dict) else {}


def get_output_base(cfg_path: Path | None = None) -> Path:
    """
    Return the output base directory.

    Uses "output_base" from the config when present and non-empty;
    otherwise ./out.
    """
    raw = load_config(cfg_path).get("output_base")
    if raw and isinstance(raw, str) and raw.strip():
        return Path(raw.strip()).resolve()
    return _DEFAULT_OUTPUT_BASE


def get_log_level(cfg_path: Path | None = None) -> str:
    raw = load_config(cfg_path).get("log_level")
    if isinstance(raw, str) and raw.strip():
        return raw.strip().upper()
    return _DEFAULT_LOG_LEVEL


def get_train_defaults(cfg_path: Path | None = None) -> Dict[str, Any]:
    """The "train" section (TrainConfig field overrides), or {}."""
    raw = load_config(cfg_path).get("train")
    return dict(raw) if isinstance(raw, dict) else {}
