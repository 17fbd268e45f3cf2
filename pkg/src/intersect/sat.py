import numpy as np

from ..models.polytope import Polytope

PARALLEL_EPS = 1e-12


def _edge_directions(poly: Polytope) -> np.ndarray:
    e = poly.vertices[poly.edges[:, 1]] - poly.vertices[poly.edges[:, 0]]
    return e / np.linalg.norm(e, axis=1)[:, None]


def separating_axes(p: Polytope, q: Polytope) -> np.ndarray:
    """Face normals of both polytopes and non-degenerate edge cross products."""
    cross = np.cross(_edge_directions(p)[:, None, :], _edge_directions(q)[None, :, :]).reshape(-1, 3)
    norm = np.linalg.norm(cross, axis=1)
    keep = norm >= PARALLEL_EPS
    cross = cross[keep] / norm[keep][:, None]
    return np.concatenate([p.normals, q.normals, cross])


def sat_intersects(p: Polytope, q: Polytope, tol: float = 1e-12) -> bool:
    """
    Separating axis test for two convex polytopes.

    Touching counts as intersecting: an axis separates only if the
    projected intervals are apart by more than tol times the scale.
    """
    axes = separating_axes(p, q)
    proj_p = axes @ p.vertices.T
    proj_q = axes @ q.vertices.T
    gap = tol * max(p.diameter, q.diameter)
    separated = (proj_p.max(axis=1) < proj_q.min(axis=1) - gap) | (proj_q.max(axis=1) < proj_p.min(axis=1) - gap)
    return not bool(separated.any())
