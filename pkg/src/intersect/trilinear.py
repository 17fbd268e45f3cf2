from typing import Optional, Tuple

import numpy as np

from ..models.mesh import HexElement

MAX_NEWTON_ITERATIONS = 50
EPS_REFERENCE = 1e-9


def inverse_trilinear_many(
    element: HexElement,
    points: np.ndarray,
    max_iter: int = MAX_NEWTON_ITERATIONS,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Newton inversion of the trilinear map for a batch of points.

    Returns the reference coordinates and a per-point convergence flag
    (residual <= 1e-12 * element diameter).
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    tol = 1e-12 * element.diameter
    if element.is_affine:
        xi = np.linalg.solve(element.affine_matrix, (x - element.center).T).T
        return xi, np.ones(len(x), dtype=bool)

    xi = np.zeros_like(x)
    converged = np.zeros(len(x), dtype=bool)
    active = np.arange(len(x))
    for _ in range(max_iter):
        resid = element.map(xi[active]) - x[active]
        norm = np.linalg.norm(resid, axis=1)
        done = norm <= tol
        converged[active[done]] = True
        active = active[~done]
        if not len(active):
            break
        jac = element.jacobian(xi[active])
        try:
            step = np.linalg.solve(jac, resid[~done][..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        xi[active] -= step
        # runaway iterates are far outside the element; stop them
        runaway = np.abs(xi[active]).max(axis=1) > 1e6
        active = active[~runaway]
    else:
        resid = np.linalg.norm(element.map(xi[active]) - x[active], axis=1)
        converged[active[resid <= tol]] = True
    return xi, converged


def inverse_trilinear(element: HexElement, x: np.ndarray) -> Optional[np.ndarray]:
    """Reference point of x, or None when Newton fails to converge."""
    xi, ok = inverse_trilinear_many(element, np.asarray(x, dtype=float).reshape(1, 3))
    return xi[0] if ok[0] else None


def points_in_reference(xi: np.ndarray, converged: np.ndarray, eps: float = EPS_REFERENCE) -> np.ndarray:
    return converged & np.all(np.abs(xi) <= 1.0 + eps, axis=-1)
