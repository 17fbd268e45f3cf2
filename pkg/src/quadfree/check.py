"""Exactness check of monomial integrals over meshes and their cut mesh."""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..mesh.cells import cell_polytope
from ..models.cutmesh import CutMesh
from ..models.mesh import Aabb, PolyMesh
from ..models.polytope import Monomial
from .cache import MonomialCache
from .meshes import box_monomial_integral, integrate_over_cutmesh, integrate_over_mesh, relative_error
from .tessellation import integrate_tessellated

logger = logging.getLogger(__name__)

CHECK_COLUMNS = ["mesh", "monomial", "value", "exact", "E_rel", "E_rel_tessellation"]


def _bounding_box(mesh: PolyMesh) -> Aabb:
    return Aabb.from_points(mesh.vertices)


def _fills_box(mesh: PolyMesh, box: Aabb) -> bool:
    volume = float(np.prod(box.extent))
    return abs(float(mesh.geometry.cell_volume.sum()) - volume) <= 1e-12 * volume


def _tessellated_sum(polytopes, m: Monomial) -> float:
    return float(sum(integrate_tessellated(p, m, m.degree) for p in polytopes))


def integration_check(
    acoustic: PolyMesh,
    fluid: PolyMesh,
    cut: CutMesh,
    monomials: Sequence[Sequence[int]],
    tessellation: bool = True,
) -> pd.DataFrame:
    """
    E_rel of the quadrature-free integral per (mesh, monomial).

    The reference is the closed form over the bounding box when the mesh fills
    it, and the sub-tessellation sum otherwise.
    """
    cache = MonomialCache()
    rows: List[dict] = []
    targets: List[Tuple[str, PolyMesh, Optional[CutMesh]]] = [
        ("acoustic", acoustic, None),
        ("fluid", fluid, None),
        ("cut", acoustic, cut),
    ]
    for name, mesh, cutmesh in targets:
        box = _bounding_box(mesh)
        closed_form = _fills_box(mesh, box)
        if cutmesh is None:
            polytopes = [cell_polytope(mesh, c) for c in range(mesh.n_cells)]
        else:
            polytopes = [cutmesh.polytope(i) for i in range(len(cutmesh))]
        for raw in monomials:
            m = Monomial.parse(raw)
            if cutmesh is None:
                value = integrate_over_mesh(mesh, m, cache)
            else:
                value = integrate_over_cutmesh(cutmesh, m, cache)
            tess = _tessellated_sum(polytopes, m) if (tessellation or not closed_form) else float("nan")
            exact = box_monomial_integral(box, m) if closed_form else tess
            rows.append(
                {
                    "mesh": name,
                    "monomial": "x^{}y^{}z^{}".format(*m),
                    "value": value,
                    "exact": exact,
                    "E_rel": relative_error(value, exact),
                    "E_rel_tessellation": relative_error(tess, exact) if tessellation else float("nan"),
                }
            )
            logger.info("%s %s: E_rel = %.3e", name, rows[-1]["monomial"], rows[-1]["E_rel"])
    return pd.DataFrame(rows, columns=CHECK_COLUMNS)
