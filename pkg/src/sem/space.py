"""Continuous tensor-product GLL space on a hexahedral mesh."""

import logging
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Callable, List, Optional, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..intersect.trilinear import inverse_trilinear_many
from ..mesh.cells import hex_elements
from ..models.errors import GeometryError, InvalidArgumentError
from ..models.mesh import HEX_LOCAL_FACES, HexElement, PolyMesh, trilinear_shape, trilinear_shape_gradient
from .basis import GllBasis, build_basis

logger = logging.getLogger(__name__)

# predicate(face centroid, outward unit normal) -> absorbing?
AbsorbingPredicate = Callable[[np.ndarray, np.ndarray], bool]


class NodeTag(IntEnum):
    INTERIOR = 0
    NEUMANN = 1
    ABSORBING = 2


@dataclass(frozen=True, eq=False)
class BoundaryFace:
    element: int
    local_face: int
    mesh_face: int
    absorbing: bool


@dataclass(frozen=True, eq=False)
class SemSpace:
    mesh: PolyMesh
    basis: GllBasis
    elements: List[HexElement]
    l2g: np.ndarray  # (E, (r+1)^3)
    coords: np.ndarray  # (N, 3)
    node_tag: np.ndarray  # (N,)
    boundary_faces: List[BoundaryFace]

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @cached_property
    def corners(self) -> np.ndarray:
        return np.stack([e.corners for e in self.elements])

    @cached_property
    def local_nodes(self) -> np.ndarray:
        return self.basis.tensor_nodes()

    def jacobians(self, xi: np.ndarray) -> np.ndarray:
        """J[e, q, x, d] for every element at reference points."""
        grad = trilinear_shape_gradient(xi)
        return np.einsum("qcd,ecx->eqxd", grad, self.corners)

    def physical_points(self, xi: np.ndarray) -> np.ndarray:
        return np.einsum("qc,ecx->eqx", trilinear_shape(xi), self.corners)

    def face_node_ids(self, local_face: int) -> np.ndarray:
        axis, side = divmod(local_face, 2)
        n = self.basis.n_nodes
        idx = np.arange(n**3)
        digits = [idx % n, (idx // n) % n, idx // (n * n)]
        return idx[digits[axis] == (0 if side == 0 else n - 1)]

    @cached_property
    def _element_tree(self) -> cKDTree:
        return cKDTree(self.corners.mean(axis=1))

    def locate(self, points: np.ndarray, candidates: int = 8):
        """Element index and reference coordinates of each point; -1 outside the mesh."""
        pts = np.atleast_2d(points)
        k = min(candidates, self.n_elements)
        _, near = self._element_tree.query(pts, k=k)
        near = np.asarray(near).reshape(len(pts), k)
        found = np.full(len(pts), -1, dtype=np.int64)
        xi_out = np.zeros((len(pts), 3))
        for rank in range(k):
            todo = np.flatnonzero(found < 0)
            if not len(todo):
                break
            for e in np.unique(near[todo, rank]):
                sel = todo[near[todo, rank] == e]
                xi, ok = inverse_trilinear_many(self.elements[e], pts[sel])
                inside = ok & np.all(np.abs(xi) <= 1.0 + 1e-9, axis=1)
                found[sel[inside]] = e
                xi_out[sel[inside]] = xi[inside]
        return found, xi_out

    def interpolation_matrix(self, points: np.ndarray) -> sparse.csr_matrix:
        """Sparse operator mapping nodal values to values at the points (zero rows outside)."""
        elem, xi = self.locate(points)
        inside = np.flatnonzero(elem >= 0)
        phi = self.basis.tensor_values(xi[inside]) if len(inside) else np.zeros((0, self.l2g.shape[1]))
        rows = np.repeat(inside, self.l2g.shape[1])
        cols = self.l2g[elem[inside]].reshape(-1)
        return sparse.csr_matrix((phi.reshape(-1), (rows, cols)), shape=(len(elem), self.n_nodes))

    def evaluate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Field values at physical points; NaN outside the mesh."""
        elem, xi = self.locate(points)
        out = np.full(len(elem), np.nan)
        inside = elem >= 0
        if inside.any():
            phi = self.basis.tensor_values(xi[inside])
            out[inside] = np.einsum("pa,pa->p", phi, np.asarray(values)[self.l2g[elem[inside]]])
        return out

    def interpolate(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Nodal interpolant of a function of physical coordinates."""
        return np.asarray(func(self.coords), dtype=float)


def _absorbing_predicate(absorbing: Union[None, str, AbsorbingPredicate]) -> AbsorbingPredicate:
    if absorbing is None or absorbing == "none":
        return lambda centroid, normal: False
    if absorbing == "all":
        return lambda centroid, normal: True
    if callable(absorbing):
        return absorbing
    raise InvalidArgumentError(f"unknown absorbing boundary selector {absorbing!r}")


def build_space(
    mesh: PolyMesh,
    degree: int,
    absorbing: Union[None, str, AbsorbingPredicate] = None,
) -> SemSpace:
    """
    Continuous Q_r space with shared nodes on faces, edges and corners.

    Coincident element nodes are merged geometrically; global numbers follow
    first appearance in element order. Boundary faces are tagged absorbing
    when the predicate accepts them and Neumann otherwise.
    """
    basis = build_basis(degree)
    elements = hex_elements(mesh)
    corners = np.stack([e.corners for e in elements])
    ref = basis.tensor_nodes()
    det = np.linalg.det(np.einsum("qcd,ecx->eqxd", trilinear_shape_gradient(ref), corners))
    bad = np.argwhere(det <= 0.0)
    if len(bad):
        raise GeometryError("non-positive Jacobian at a GLL node", element=int(bad[0, 0]))

    pts = np.einsum("qc,ecx->eqx", trilinear_shape(ref), corners).reshape(-1, 3)
    n_loc = len(ref)
    h_min = float(np.linalg.norm(corners[:, 1] - corners[:, 0], axis=1).min())
    tol = 1e-8 * h_min / degree
    pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
    graph = sparse.coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(pts), len(pts))
    )
    _, labels = connected_components(graph, directed=False)
    # renumber by first appearance so numbering is independent of the graph traversal
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    global_ids = rank[labels]
    l2g = global_ids.reshape(len(elements), n_loc)
    coords = np.zeros((len(order), 3))
    coords[global_ids] = pts

    predicate = _absorbing_predicate(absorbing)
    geo = mesh.geometry
    corner_sets = {}
    for e, element in enumerate(elements):
        for lf, local in enumerate(HEX_LOCAL_FACES):
            corner_sets[(e, frozenset(element.corner_ids[c] for c in local))] = lf
    tags = np.zeros(len(coords), dtype=np.int8)
    faces: List[BoundaryFace] = []
    space = SemSpace(mesh, basis, elements, l2g, coords, tags, faces)
    for f in geo.boundary_faces:
        e = int(geo.face_cells[f, 0])
        lf = corner_sets.get((e, frozenset(mesh.faces[f])))
        if lf is None:
            raise GeometryError("boundary face does not match a hexahedron face", face=int(f), element=e)
        s = mesh.cell_signs[e][mesh.cell_faces[e].index(int(f))]
        normal = geo.face_normal[f] * s
        is_abs = bool(predicate(geo.face_centroid[f], normal))
        faces.append(BoundaryFace(e, lf, int(f), is_abs))
        nodes = l2g[e, space.face_node_ids(lf)]
        tag = NodeTag.ABSORBING if is_abs else NodeTag.NEUMANN
        tags[nodes] = np.maximum(tags[nodes], tag)
    logger.info(
        "SEM space: %d elements, degree %d, %d nodes, %d absorbing faces",
        len(elements),
        degree,
        len(coords),
        sum(bf.absorbing for bf in faces),
    )
    return space
