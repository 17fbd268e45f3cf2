"""Point-value field tables and probe lines."""

from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from ..models.errors import InvalidArgumentError
from .space import SemSpace


def field_table(space: SemSpace, values: np.ndarray, name: str = "rho") -> pd.DataFrame:
    values = np.asarray(values, dtype=float)
    if len(values) != space.n_nodes:
        raise InvalidArgumentError(f"expected {space.n_nodes} nodal values, got {len(values)}")
    return pd.DataFrame(
        {"x": space.coords[:, 0], "y": space.coords[:, 1], "z": space.coords[:, 2], name: values}
    )


def write_field_table(path: Union[str, Path], space: SemSpace, values: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    field_table(space, values).to_csv(path, sep=" ", index=False, float_format="%.17g")
    return path


def probe_points(origin: Sequence[float], direction: Sequence[float], length: float, samples: int) -> np.ndarray:
    if samples < 2:
        raise InvalidArgumentError("a probe line needs at least two samples")
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0.0 or length <= 0.0:
        raise InvalidArgumentError("probe direction and length must be non-zero")
    s = np.linspace(0.0, length, samples)
    return np.asarray(origin, dtype=float)[None, :] + s[:, None] * (d / norm)[None, :]


def extract_probe_line(
    space: SemSpace,
    values: np.ndarray,
    origin: Sequence[float],
    direction: Sequence[float],
    length: float,
    samples: int,
) -> pd.DataFrame:
    """Samples the field along a segment; points outside the mesh get NaN."""
    pts = probe_points(origin, direction, length, samples)
    return pd.DataFrame(
        {
            "s": np.linspace(0.0, length, samples),
            "x": pts[:, 0],
            "y": pts[:, 1],
            "z": pts[:, 2],
            "value": space.evaluate(values, pts),
        }
    )
