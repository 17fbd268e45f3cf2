"""CSV and YAML writers plus log-log slope fits."""

import logging
from pathlib import Path
from typing import Any, Dict, Sequence, Union

import numpy as np
import pandas as pd
import yaml

from ..models.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


def write_yaml(data: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.safe_dump(data, f, sort_keys=False)
    return path


def loglog_slope(h: Sequence[float], error: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h); NaN when an error is not positive."""
    h_arr = np.asarray(h, dtype=float)
    e_arr = np.asarray(error, dtype=float)
    if len(h_arr) != len(e_arr) or len(h_arr) < 2:
        raise InvalidArgumentError("a slope needs at least two matching samples")
    if np.any(e_arr <= 0.0) or np.any(h_arr <= 0.0):
        return float("nan")
    slope, _ = np.polyfit(np.log(h_arr), np.log(e_arr), 1)
    return float(slope)
