"""
Configuration loading.

Defaults come from defaults.yaml next to this module. A user file is
deep-merged over them, then HYBRID_CAA_* environment variables, then
explicit overrides (command-line flags). The result is validated by the
RunConfig model.
"""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import ValidationError

from ..models.config import RunConfig
from ..models.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).parent / "defaults.yaml"
ENV_PREFIX = "HYBRID_CAA_"
ENV_KEYS = {"WORKERS": "workers", "LOG_LEVEL": "log_level", "OUTPUT_DIR": "output_dir", "SEED": "seed"}
ECHO_NAME = "config.echo"


def load_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError as exc:
        raise InvalidArgumentError(f"configuration file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise InvalidArgumentError(f"configuration file {path} is not valid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidArgumentError(f"configuration file {path} must hold a mapping")
    return data


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge mappings; override wins and lists are replaced."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def env_overrides(environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    environ = os.environ if environ is None else environ
    run = {}
    for suffix, key in ENV_KEYS.items():
        value = environ.get(ENV_PREFIX + suffix)
        if value:
            run[key] = value
    return {"run": run} if run else {}


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
    environ: Optional[Dict[str, str]] = None,
) -> RunConfig:
    data = load_yaml(DEFAULTS_PATH)
    if path is not None:
        data = deep_merge(data, load_yaml(path))
    data = deep_merge(data, env_overrides(environ))
    if overrides:
        data = deep_merge(data, overrides)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise InvalidArgumentError(f"invalid configuration:\n{exc}") from exc


def write_config_echo(config: RunConfig, directory: Union[str, Path]) -> Path:
    """Write the merged, validated configuration as YAML."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    path = out / ECHO_NAME
    with open(path, "w") as f:
        yaml.safe_dump(config.model_dump(mode="json"), f, sort_keys=True)
    logger.debug("configuration echoed to %s", path)
    return path
