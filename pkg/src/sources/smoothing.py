import numpy as np

from ..models.errors import InvalidArgumentError


def smoothing_factor(x, r_i: float, r_o: float):
    """1 below r_i, cosine taper to 0 at r_o, 0 beyond."""
    if r_i >= r_o:
        raise InvalidArgumentError(f"inner radius {r_i} must be below outer radius {r_o}")
    arr = np.asarray(x, dtype=float)
    s = np.clip((arr - r_i) / (r_o - r_i), 0.0, 1.0)
    out = 0.5 * (1.0 + np.cos(np.pi * s))
    return float(out) if out.ndim == 0 else out


def radial_taper(points: np.ndarray, r_i: float, r_o: float) -> np.ndarray:
    """Smoothing factor of the distance to the z axis."""
    pts = np.atleast_2d(points)
    return smoothing_factor(np.hypot(pts[:, 0], pts[:, 1]), r_i, r_o)
