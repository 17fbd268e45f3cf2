"""Monomial integrals summed over whole meshes and cut meshes."""

from typing import Optional, Sequence

import numpy as np

from ..mesh.cells import cell_polytope
from ..models.cutmesh import CutMesh
from ..models.mesh import Aabb, PolyMesh
from ..models.polytope import Monomial
from .cache import MonomialCache


def integrate_over_mesh(mesh: PolyMesh, monomial: Sequence[int], cache: Optional[MonomialCache] = None) -> float:
    cache = MonomialCache() if cache is None else cache
    values = [cache.integrate(cell_polytope(mesh, c), monomial) for c in range(mesh.n_cells)]
    return float(sum(values))


def integrate_over_cutmesh(cut: CutMesh, monomial: Sequence[int], cache: Optional[MonomialCache] = None) -> float:
    """Sum over records in (acoustic, fluid) order."""
    cache = MonomialCache() if cache is None else cache
    values = [cache.integrate(cut.polytope(i), monomial) for i in range(len(cut))]
    return float(sum(values))


def box_monomial_integral(box: Aabb, monomial: Sequence[int]) -> float:
    """Closed-form integral over an axis-aligned box."""
    m = Monomial.parse(monomial)
    value = 1.0
    for lo, hi, p in zip(box.min, box.max, m):
        value *= (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)
    return float(value)


def relative_error(value: float, exact: float) -> float:
    """|exact - value| / |exact|."""
    if exact == 0.0:
        return float(abs(value))
    return float(abs(exact - value) / abs(exact))


def box_moment_tensor(lower, upper, order: int) -> np.ndarray:
    """M[a, b, c] over the box [lower, upper] in closed form."""
    powers = np.arange(order + 1)
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    axis = [(hi[d] ** (powers + 1) - lo[d] ** (powers + 1)) / (powers + 1) for d in range(3)]
    return np.einsum("a,b,c->abc", *axis)
