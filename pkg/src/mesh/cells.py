from typing import List, Tuple

import numpy as np

from ..models.errors import GeometryError, InvalidArgumentError
from ..models.mesh import HEX_REFERENCE_CORNERS, HexElement, PolyMesh
from ..models.polytope import Polytope
from .validation import EPS_PLANAR


def _check_cell(mesh: PolyMesh, cell: int) -> None:
    if not 0 <= cell < mesh.n_cells:
        raise InvalidArgumentError(f"cell {cell} out of range for {mesh.n_cells} cells")


def _planarity(pts: np.ndarray) -> float:
    area = 0.5 * np.cross(pts, np.roll(pts, -1, axis=0)).sum(axis=0)
    norm = np.linalg.norm(area)
    if norm == 0.0:
        return np.inf
    n = area / norm
    dist = np.abs((pts - pts.mean(axis=0)) @ n).max()
    return float(dist / np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))


def cell_polytope(mesh: PolyMesh, cell: int, eps_planar: float = EPS_PLANAR) -> Polytope:
    """
    Boundary representation of one cell with outward face cycles.

    Warped quadrilaterals are split into two triangles along the diagonal
    that keeps the cell convex; other non-planar faces are rejected.
    """
    _check_cell(mesh, cell)
    ids = mesh.cell_vertex_ids(cell)
    local = {int(v): i for i, v in enumerate(ids)}
    verts = mesh.vertices[ids]
    faces: List[Tuple[int, ...]] = []
    for f, cycle in zip(mesh.cell_faces[cell], mesh.oriented_faces(cell)):
        cyc = tuple(local[v] for v in cycle)
        pts = verts[list(cyc)]
        if len(cyc) > 3 and _planarity(pts) > eps_planar:
            if len(cyc) != 4:
                raise GeometryError("non-planar face", face=f, cell=cell)
            a, b, c, d = cyc
            n_abc = np.cross(verts[b] - verts[a], verts[c] - verts[a])
            if np.dot(verts[d] - verts[a], n_abc) <= 0.0:
                faces.extend([(a, b, c), (a, c, d)])
            else:
                faces.extend([(a, b, d), (b, c, d)])
        else:
            faces.append(cyc)
    return Polytope.from_faces(verts, faces)


def hex_corner_ids(mesh: PolyMesh, cell: int) -> Tuple[int, ...]:
    """Recover the 8 corners of a hexahedral cell in reference order."""
    _check_cell(mesh, cell)
    cycles = list(mesh.oriented_faces(cell))
    ids = mesh.cell_vertex_ids(cell)
    if len(cycles) != 6 or any(len(c) != 4 for c in cycles) or len(ids) != 8:
        raise GeometryError("cell is not a hexahedron", cell=cell)

    pts = mesh.vertices
    normals = []
    for cyc in cycles:
        p = pts[list(cyc)]
        normals.append(0.5 * np.cross(p, np.roll(p, -1, axis=0)).sum(axis=0))
    zs = np.array([n[2] / (np.linalg.norm(n) or 1.0) for n in normals])
    bottom = list(reversed(cycles[int(np.argmin(zs))]))
    # start at the lowest x + y corner so axis-aligned cells map xi, eta onto x, y
    keys = np.array([[pts[v, 0] + pts[v, 1], pts[v, 0], pts[v, 1]] for v in bottom])
    start = int(np.lexsort(keys.T[::-1])[0])
    bottom = bottom[start:] + bottom[:start]

    neighbours = {int(v): set() for v in ids}
    for cyc in cycles:
        for i, v in enumerate(cyc):
            w = cyc[(i + 1) % 4]
            neighbours[v].add(w)
            neighbours[w].add(v)
    base = set(bottom)
    top = []
    for v in bottom:
        partner = neighbours[v] - base
        if len(partner) != 1:
            raise GeometryError("cell is not a hexahedron", cell=cell)
        top.append(partner.pop())
    return tuple(int(v) for v in bottom + top)


def hex_element(mesh: PolyMesh, cell: int) -> HexElement:
    corner_ids = hex_corner_ids(mesh, cell)
    element = HexElement(mesh.vertices[list(corner_ids)], corner_ids, cell)
    # the centre alone misses folded corners
    checks = np.vstack([np.zeros((1, 3)), HEX_REFERENCE_CORNERS])
    if (np.linalg.det(element.jacobian(checks)) <= 0.0).any():
        raise GeometryError("hexahedron has non-positive Jacobian", element=cell)
    return element


def hex_elements(mesh: PolyMesh) -> List[HexElement]:
    return [hex_element(mesh, c) for c in range(mesh.n_cells)]
