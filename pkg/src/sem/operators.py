import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy import sparse

from ..models.errors import GeometryError
from .space import SemSpace

logger = logging.getLogger(__name__)

# float entries per assembly chunk
CHUNK_ENTRIES = 4_000_000


class Material(BaseModel):
    c0: float = Field(default=1.0, gt=0, description="speed of sound [m/s]")
    rho0: float = Field(default=1.0, gt=0, description="reference density [kg/m^3]")


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """Jacobian data of every element at its GLL nodes."""

    det: np.ndarray  # (E, Q)
    inv: np.ndarray  # (E, Q, 3, 3), inv[e, q, d, x] = d xi_d / d x_x
    weights: np.ndarray  # (E, Q), GLL weight * det


def element_geometry(space: SemSpace) -> ElementGeometry:
    jac = space.jacobians(space.local_nodes)
    det = np.linalg.det(jac)
    if np.any(det <= 0.0):
        raise GeometryError("non-positive Jacobian", element=int(np.argwhere(det <= 0.0)[0, 0]))
    inv = np.linalg.inv(jac)
    return ElementGeometry(det, inv, det * space.basis.tensor_weights()[None, :])


def physical_gradients(space: SemSpace, geo: ElementGeometry, chunk: slice) -> np.ndarray:
    """grad[e, q, x, a] = d phi_a / d x_x at node q of each element in the chunk."""
    ref = space.basis.reference_gradients()  # (3, Q, A)
    return np.einsum("eqdx,dqa->eqxa", geo.inv[chunk], ref)


@dataclass(frozen=True, eq=False)
class WaveOperators:
    """Nodal-integration mass, stiffness and absorbing matrices."""

    mass: np.ndarray
    stiffness: sparse.csr_matrix
    damping: sparse.csr_matrix
    material: Material

    @property
    def n_nodes(self) -> int:
        return len(self.mass)

    @cached_property
    def mass_matrix(self) -> sparse.csr_matrix:
        return sparse.diags(self.mass, format="csr")


def _chunks(space: SemSpace):
    n_loc = space.l2g.shape[1]
    size = max(1, CHUNK_ENTRIES // (3 * n_loc * n_loc))
    for start in range(0, space.n_elements, size):
        yield slice(start, min(start + size, space.n_elements))


def _scatter(rows: List[np.ndarray], cols: List[np.ndarray], vals: List[np.ndarray], shape):
    mat = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=shape
    )
    return mat.tocsr()


def assemble_operators(space: SemSpace, material: Optional[Material] = None) -> WaveOperators:
    """
    M: diagonal GLL mass. K: c0^2 (grad phi_i, grad phi_j) with GLL nodal
    integration. C: c0 times the diagonal GLL surface mass on absorbing faces.
    """
    material = material or Material()
    geo = element_geometry(space)
    n = space.n_nodes
    l2g = space.l2g
    mass = np.bincount(l2g.ravel(), weights=geo.weights.ravel(), minlength=n)

    rows, cols, vals = [], [], []
    n_loc = l2g.shape[1]
    for chunk in _chunks(space):
        grad = physical_gradients(space, geo, chunk)
        k_loc = material.c0**2 * np.einsum("eq,eqxa,eqxb->eab", geo.weights[chunk], grad, grad)
        ids = l2g[chunk]
        rows.append(np.repeat(ids, n_loc, axis=1).ravel())
        cols.append(np.tile(ids, (1, n_loc)).ravel())
        vals.append(k_loc.ravel())
    stiffness = _scatter(rows, cols, vals, (n, n))

    damping_diag = np.zeros(n)
    w = space.basis.weights
    for bf in space.boundary_faces:
        if not bf.absorbing:
            continue
        axis = bf.local_face // 2
        node_ids = space.face_node_ids(bf.local_face)
        xi = space.local_nodes[node_ids]
        jac = space.elements[bf.element].jacobian(xi)
        tangential = [d for d in range(3) if d != axis]
        area = np.linalg.norm(np.cross(jac[:, :, tangential[0]], jac[:, :, tangential[1]]), axis=1)
        # weights of the two tangential node indices
        n1 = space.basis.n_nodes
        digits = np.stack([node_ids % n1, (node_ids // n1) % n1, node_ids // (n1 * n1)], axis=1)
        wt = w[digits[:, tangential[0]]] * w[digits[:, tangential[1]]]
        np.add.at(damping_diag, space.l2g[bf.element, node_ids], material.c0 * wt * area)
    damping = sparse.diags(damping_diag, format="csr")

    logger.info("assembled wave operators: %d dofs, %d stiffness nonzeros", n, stiffness.nnz)
    return WaveOperators(mass, stiffness, damping, material)


def divergence_operators(space: SemSpace) -> List[sparse.csr_matrix]:
    """
    G_d[i, j] = sum over elements of w_j det_j d phi_i / d x_d (x_j).

    The weak right-hand side of the Lighthill equation is F = -sum_d G_d q_d.
    """
    geo = element_geometry(space)
    n = space.n_nodes
    n_loc = space.l2g.shape[1]
    rows: List[List[np.ndarray]] = [[], [], []]
    cols: List[List[np.ndarray]] = [[], [], []]
    vals: List[List[np.ndarray]] = [[], [], []]
    for chunk in _chunks(space):
        grad = physical_gradients(space, geo, chunk)  # (e, q, x, a)
        ids = space.l2g[chunk]
        for d in range(3):
            # entry (a, q): w_q det_q d phi_a / d x_d at node q
            local = np.einsum("eq,eqa->eaq", geo.weights[chunk], grad[:, :, d, :])
            rows[d].append(np.repeat(ids, n_loc, axis=1).ravel())
            cols[d].append(np.tile(ids, (1, n_loc)).ravel())
            vals[d].append(local.ravel())
    return [_scatter(rows[d], cols[d], vals[d], (n, n)) for d in range(3)]
