"""Reference quadrature by centroid tetrahedralisation and collapsed Gauss rules."""

from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..models.errors import InvalidArgumentError
from ..models.polytope import Polytope


@lru_cache(maxsize=32)
def collapsed_tet_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rule on the unit tetrahedron collapsed from an n^3 tensor Gauss rule."""
    x, w = leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    u, v, t = np.meshgrid(x, x, x, indexing="ij")
    wu, wv, wt = np.meshgrid(w, w, w, indexing="ij")
    xi = np.stack([u * (1.0 - v), u * v * (1.0 - t), u * v * t], axis=-1).reshape(-1, 3)
    weights = (wu * wv * wt * u**2 * v).reshape(-1)
    return xi, weights


def tessellation_rule(polytope: Polytope, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points and weights integrating polynomials of the given degree exactly."""
    if degree < 0:
        raise InvalidArgumentError("degree must be non-negative")
    xi, w = collapsed_tet_rule(degree // 2 + 2)
    centre = polytope.vertices[sorted({v for f in polytope.faces for v in f})].mean(axis=0)
    points, weights = [], []
    for cyc in polytope.faces:
        p0 = polytope.vertices[cyc[0]]
        for k in range(1, len(cyc) - 1):
            p1, p2 = polytope.vertices[cyc[k]], polytope.vertices[cyc[k + 1]]
            edges = np.stack([p0 - centre, p1 - centre, p2 - centre], axis=1)
            det = np.linalg.det(edges)
            points.append(centre + xi @ edges.T)
            weights.append(det * w)
    return np.concatenate(points), np.concatenate(weights)


def integrate_tessellated(
    polytope: Polytope,
    func: Callable[[np.ndarray], np.ndarray],
    degree: int,
) -> float:
    """Integral of func over the polytope with a rule exact up to the given degree."""
    points, weights = tessellation_rule(polytope, degree)
    return float(np.dot(weights, func(points)))
