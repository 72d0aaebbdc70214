from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from rolesim.core.config import get_settings
from rolesim.core.exceptions import GraphIOError, GraphParseError
from rolesim.schemas.benchmark import NoiseLevel


def load_experiment_config(path: Path | None = None) -> dict[str, Any]:
    config_path = path or get_settings().experiments_config
    try:
        with Path(config_path).open("r", encoding="utf-8") as file:
            data = yaml.safe_load(file)
    except OSError as exc:
        raise GraphIOError(config_path, exc.strerror or str(exc)) from exc
    except UnicodeDecodeError as exc:
        raise GraphParseError(config_path, 1, "file is not valid UTF-8") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line_number = mark.line + 1 if mark is not None else 1
        raise GraphParseError(config_path, line_number, "invalid YAML") from exc
    return data or {}


def panel_levels(config: dict[str, Any] | None = None) -> list[NoiseLevel]:
    """Noise settings of the panel experiment, in file order."""
    config = load_experiment_config() if config is None else config
    panel = config.get("panel", {}) or {}
    return [NoiseLevel(**level) for level in panel.get("levels", [])]


def grid_defaults(config: dict[str, Any] | None = None) -> dict[str, Any]:
    config = load_experiment_config() if config is None else config
    return dict(config.get("grid", {}) or {})
