"""
Cell-wise divergence of the Lighthill tensor rho0 u (x) u on a polyhedral mesh.

Gauss face sums: div T_K = 1/|K| sum_F T_F n_F |F|. Interior face values
interpolate linearly between the two cell centroids at the point where the
centroid segment crosses the face plane; boundary faces take the owner
value.
"""

import logging
from typing import Optional, Union

import numpy as np
from scipy import sparse

from ..models.errors import GeometryError, InvalidArgumentError
from ..models.mesh import CellField, PolyMesh

logger = logging.getLogger(__name__)


class LighthillOperator:
    """Sparse face interpolation and face-sum operators of one fluid mesh."""

    def __init__(self, mesh: PolyMesh):
        self.mesh = mesh
        geo = mesh.geometry
        n_faces, n_cells = mesh.n_faces, mesh.n_cells
        owner = geo.face_cells[:, 0]
        neighbour = geo.face_cells[:, 1]
        interior = neighbour >= 0

        c_own = geo.cell_centroid[owner]
        c_nb = geo.cell_centroid[np.where(interior, neighbour, owner)]
        n = geo.face_normal
        denom = np.einsum("fd,fd->f", c_nb - c_own, n)
        flat = interior & (np.abs(denom) <= 1e-14 * geo.cell_diameter[owner])
        if flat.any():
            raise GeometryError("centroid segment is parallel to the face", face=int(np.flatnonzero(flat)[0]))
        weight = np.where(
            interior,
            np.einsum("fd,fd->f", geo.face_centroid - c_own, n) / np.where(interior, denom, 1.0),
            0.0,
        )
        faces = np.arange(n_faces)
        rows = np.concatenate([faces, faces[interior]])
        cols = np.concatenate([owner, neighbour[interior]])
        vals = np.concatenate([1.0 - weight, weight[interior]])
        self.interpolation = sparse.csr_matrix((vals, (rows, cols)), shape=(n_faces, n_cells))
        self.weights = weight

        # face sum with outward area vectors per incidence, divided by cell volume
        scale = geo.incidence_sign * geo.face_area[geo.incidence_face] / geo.cell_volume[geo.incidence_cell]
        self.face_sum = sparse.csr_matrix(
            (scale, (geo.incidence_cell, geo.incidence_face)), shape=(n_cells, n_faces)
        )
        self.normals = n
        logger.debug("Lighthill operator: %d faces, %d interior", n_faces, int(interior.sum()))

    def divergence_of(self, tensor: np.ndarray) -> np.ndarray:
        """Divergence (C, 3) of a cell tensor field (C, 3, 3), sum_j d_j T_ij."""
        t_face = np.stack([self.interpolation @ tensor[:, :, j] for j in range(3)], axis=2)  # (F, 3, 3)
        flux = np.einsum("fij,fj->fi", t_face, self.normals)
        return self.face_sum @ flux

    def divergence(self, velocity: np.ndarray, rho0: float = 1.0) -> np.ndarray:
        """Divergence of rho0 u (x) u for a cell velocity field (C, 3) or (C, 2)."""
        u = np.asarray(velocity, dtype=float)
        if u.shape[0] != self.mesh.n_cells:
            raise InvalidArgumentError(f"velocity has {u.shape[0]} rows but mesh has {self.mesh.n_cells} cells")
        if u.shape[1] == 2:
            u = np.column_stack([u, np.zeros(len(u))])
        return self.divergence_of(rho0 * u[:, :, None] * u[:, None, :])


def lighthill_divergence(
    mesh: PolyMesh,
    velocity: Union[CellField, np.ndarray],
    rho0: float = 1.0,
    operator: Optional[LighthillOperator] = None,
) -> CellField:
    values = velocity.check(mesh) if isinstance(velocity, CellField) else velocity
    op = LighthillOperator(mesh) if operator is None else operator
    return CellField.on(mesh, op.divergence(values, rho0))
