import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel

from ..sem.space import SemSpace
from ..utils.solvers import SpdSolver
from .coupling import assemble_mass_matrix, gauss_rule
from .solve import PROJECTION_RTOL

logger = logging.getLogger(__name__)


class ErrorNorms(BaseModel):
    """L2 errors between the field f, its direct projection f_p and the coupled projection f_a."""

    E_a: float
    E_fp: float
    E_pa: float


def _quadrature(space: SemSpace, n_points: int):
    xi, w = gauss_rule(n_points)
    det = np.abs(np.linalg.det(space.jacobians(xi)))
    weights = w[None, :] * det  # (E, Q)
    points = space.physical_points(xi)  # (E, Q, 3)
    phi = space.basis.tensor_values(xi)  # (Q, A)
    return points, weights, phi


def _at_quadrature(values: np.ndarray, space: SemSpace, phi: np.ndarray) -> np.ndarray:
    return np.einsum("qa,ea->eq", phi, np.asarray(values)[space.l2g])


def _field_at(f: Callable[[np.ndarray], np.ndarray], points: np.ndarray) -> np.ndarray:
    return np.asarray(f(points.reshape(-1, 3)), dtype=float).reshape(points.shape[:2])


def project_function(space: SemSpace, f: Callable[[np.ndarray], np.ndarray], n_points: Optional[int] = None) -> np.ndarray:
    """f_p, the L2 projection of f onto the space, with (r + 4)-point Gauss load vectors."""
    n_points = space.degree + 4 if n_points is None else n_points
    points, weights, phi = _quadrature(space, n_points)
    local = np.einsum("eq,eq,qa->ea", weights, _field_at(f, points), phi)
    load = np.bincount(space.l2g.ravel(), weights=local.ravel(), minlength=space.n_nodes)
    mass = assemble_mass_matrix(space)
    return SpdSolver(mass, rtol=PROJECTION_RTOL, maxiter=10 * space.n_nodes).solve(load)


def l2_norm(space: SemSpace, values: np.ndarray, n_points: Optional[int] = None) -> float:
    n_points = space.degree + 4 if n_points is None else n_points
    _, weights, phi = _quadrature(space, n_points)
    return float(np.sqrt(np.sum(weights * _at_quadrature(values, space, phi) ** 2)))


def error_norms(
    f: Callable[[np.ndarray], np.ndarray],
    q_a: np.ndarray,
    space: SemSpace,
    f_p: Optional[np.ndarray] = None,
) -> ErrorNorms:
    """
    E_a = ||f - f_a||, E_fp = ||f - f_p||, E_pa = ||f_p - f_a|| over the acoustic domain.

    All three use an (r + 4)-point Gauss rule per element. f_p is computed
    when not supplied; a sweep reuses it across fluid grids.
    """
    if f_p is None:
        f_p = project_function(space, f)
    points, weights, phi = _quadrature(space, space.degree + 4)
    exact = _field_at(f, points)
    fa = _at_quadrature(q_a, space, phi)
    fp = _at_quadrature(f_p, space, phi)
    return ErrorNorms(
        E_a=float(np.sqrt(np.sum(weights * (exact - fa) ** 2))),
        E_fp=float(np.sqrt(np.sum(weights * (exact - fp) ** 2))),
        E_pa=float(np.sqrt(np.sum(weights * (fp - fa) ** 2))),
    )
