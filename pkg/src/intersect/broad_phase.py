"""Candidate pairs from axis-aligned bounding boxes."""

from typing import List

import numpy as np
from scipy.spatial import cKDTree

from ..models.mesh import Aabb, PolyMesh


def aabb_overlap(a: Aabb, b: Aabb) -> bool:
    """True iff the closed boxes share at least one point."""
    return a.overlaps(b)


def _exact_filter(lo: np.ndarray, hi: np.ndarray, f_lo: np.ndarray, f_hi: np.ndarray) -> np.ndarray:
    return np.all((lo <= f_hi) & (f_lo <= hi), axis=1)


def broad_phase(acoustic: PolyMesh, fluid: PolyMesh, brute_force: bool = False) -> List[np.ndarray]:
    """
    Sorted fluid-cell candidates for every acoustic cell.

    A k-d tree over fluid box centres with a Chebyshev query radius returns a
    superset of the overlapping boxes; the exact closed-interval test then
    trims it, so both modes give identical lists.
    """
    a_geo, f_geo = acoustic.geometry, fluid.geometry
    f_lo, f_hi = f_geo.cell_min, f_geo.cell_max
    if fluid.n_cells == 0:
        return [np.zeros(0, dtype=np.int64) for _ in range(acoustic.n_cells)]

    if brute_force:
        out = []
        for a in range(acoustic.n_cells):
            mask = _exact_filter(a_geo.cell_min[a], a_geo.cell_max[a], f_lo, f_hi)
            out.append(np.flatnonzero(mask))
        return out

    f_centre = 0.5 * (f_lo + f_hi)
    f_half = 0.5 * (f_hi - f_lo).max()
    tree = cKDTree(f_centre)
    a_centre = 0.5 * (a_geo.cell_min + a_geo.cell_max)
    a_half = 0.5 * (a_geo.cell_max - a_geo.cell_min).max(axis=1)
    # pad the radius so boxes that only touch are never lost to roundoff
    radius = (a_half + f_half) * (1.0 + 1e-12) + 1e-300
    hits = tree.query_ball_point(a_centre, r=radius, p=np.inf)
    out = []
    for a, cand in enumerate(hits):
        idx = np.asarray(sorted(cand), dtype=np.int64)
        if len(idx):
            idx = idx[_exact_filter(a_geo.cell_min[a], a_geo.cell_max[a], f_lo[idx], f_hi[idx])]
        out.append(idx)
    return out
