"""Random convex polytopes for property tests."""

import numpy as np
from scipy.spatial import ConvexHull

from src.models.polytope import Polytope


def hull_polytope(points: np.ndarray) -> Polytope:
    """Convex hull as a polytope with outward triangle cycles."""
    hull = ConvexHull(points)
    faces = []
    centre = points[hull.vertices].mean(axis=0)
    for tri in hull.simplices:
        a, b, c = points[tri]
        if np.dot(np.cross(b - a, c - a), a - centre) < 0:
            tri = tri[::-1]
        faces.append(tuple(int(v) for v in tri))
    used = sorted({v for f in faces for v in f})
    remap = {old: new for new, old in enumerate(used)}
    return Polytope.from_faces(points[used], [tuple(remap[v] for v in f) for f in faces])


def random_convex_polytope(rng: np.random.Generator, n_points: int = 12, scale: float = 1.0, centre=(0.0, 0.0, 0.0)) -> Polytope:
    pts = rng.normal(size=(n_points, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    pts *= scale * rng.uniform(0.6, 1.0, size=(n_points, 1))
    return hull_polytope(pts + np.asarray(centre, dtype=float))
