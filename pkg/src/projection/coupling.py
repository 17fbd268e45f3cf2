"""
Coupling matrices of the L2 projection from fluid cells onto the acoustic space.

M_aa is the exact Gauss mass matrix of the acoustic space. M_af[i, l] is the
integral of phi_i over the cut cells of fluid cell l. The exact (QF) variant
maps each cut cell into the reference frame of its affine element and
contracts a monomial moment tensor with the Lagrange coefficients; the
mid-point (MP) variant evaluates phi_i at the cut-cell barycentre.
"""

import logging
import time
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import sparse

from ..intersect.trilinear import inverse_trilinear_many
from ..models.cutmesh import CutMesh
from ..models.errors import InvalidArgumentError, UnsupportedGeometryError
from ..models.mesh import ProjectionMethod
from ..quadfree.cache import MonomialCache
from ..quadfree.meshes import box_moment_tensor
from ..sem.space import SemSpace
from ..utils.parallel import contiguous_blocks, map_blocks, resolve_workers

logger = logging.getLogger(__name__)

_WORKER: Dict[str, object] = {}


@dataclass(frozen=True, eq=False)
class CouplingSystem:
    mass: sparse.csr_matrix  # M_aa, (N_a, N_a)
    coupling: sparse.csr_matrix  # M_af, (N_a, N_f)
    space: SemSpace
    cut: CutMesh
    method: ProjectionMethod = ProjectionMethod.QUADRATURE_FREE

    @property
    def degree(self) -> int:
        return self.space.degree

    @property
    def n_acoustic(self) -> int:
        return self.mass.shape[0]

    @property
    def n_fluid(self) -> int:
        return self.coupling.shape[1]


def gauss_rule(n_points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre points on the reference cube in local node order, with weights."""
    x, w = leggauss(n_points)
    z, y, xx = np.meshgrid(x, x, x, indexing="ij")
    wz, wy, wx = np.meshgrid(w, w, w, indexing="ij")
    points = np.stack([xx.ravel(), y.ravel(), z.ravel()], axis=1)
    return points, (wx * wy * wz).ravel()


def assemble_mass_matrix(space: SemSpace, points: Optional[int] = None) -> sparse.csr_matrix:
    """Consistent mass matrix with an n-point Gauss rule per direction (default r + 2)."""
    n_points = space.degree + 2 if points is None else points
    xi, w = gauss_rule(n_points)
    phi = space.basis.tensor_values(xi)  # (Q, A)
    det = np.abs(np.linalg.det(space.jacobians(xi)))  # (E, Q)
    local = np.einsum("q,eq,qa,qb->eab", w, det, phi, phi)
    n_loc = space.l2g.shape[1]
    rows = np.repeat(space.l2g, n_loc, axis=1).ravel()
    cols = np.tile(space.l2g, (1, n_loc)).ravel()
    mass = sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(space.n_nodes, space.n_nodes))
    return mass.tocsr()


def _init_worker(space: SemSpace, cut: CutMesh, method: ProjectionMethod) -> None:
    _WORKER.update(space=space, cut=cut, method=method)


def _is_diagonal(matrix: np.ndarray) -> bool:
    off = matrix - np.diag(np.diag(matrix))
    return bool(np.abs(off).max() <= 1e-14 * np.abs(matrix).max())


def _qf_block(space: SemSpace, cut: CutMesh, block: Tuple[int, int]) -> np.ndarray:
    coef = space.basis.coefficients
    order = space.degree
    cache = MonomialCache()
    fluid_geo = cut.fluid.geometry
    boxes = fluid_geo.axis_aligned
    vals = np.empty((block[1] - block[0], space.l2g.shape[1]))
    for row, i in enumerate(range(*block)):
        a = int(cut.acoustic_cell[i])
        f = int(cut.fluid_cell[i])
        element = space.elements[a]
        if not element.is_affine:
            raise UnsupportedGeometryError(
                "exact projection needs affine acoustic elements", element=a
            )
        jac = element.affine_matrix
        if cut.provenance[i] == 0 and boxes[f] and _is_diagonal(jac):
            # box inside an axis-aligned element: closed-form moments
            scale = np.diag(jac)
            ends = (np.stack([fluid_geo.cell_min[f], fluid_geo.cell_max[f]]) - element.center) / scale
            moments = box_moment_tensor(ends.min(axis=0), ends.max(axis=0), order)
        else:
            ref = cut.polytope(i).affine_image(np.linalg.inv(jac), origin=element.center)
            moments = cache.moment_tensor(ref, order)
        local = np.einsum("ia,jb,kc,abc->kji", coef, coef, coef, moments)
        vals[row] = local.ravel() * abs(np.linalg.det(jac))
    logger.debug("QF block %s: moment cache hit rate %.2f", block, cache.hit_rate)
    return vals


def _barycentres(cut: CutMesh, block: Tuple[int, int]) -> np.ndarray:
    centres = cut.fluid.geometry.cell_centroid[cut.fluid_cell[block[0]:block[1]]].copy()
    for row, i in enumerate(range(*block)):
        if cut.provenance[i] != 0:
            centres[row] = cut.polytope(i).centroid
    return centres


def _mp_block(space: SemSpace, cut: CutMesh, block: Tuple[int, int]) -> np.ndarray:
    centres = _barycentres(cut, block)
    elems = cut.acoustic_cell[block[0]:block[1]]
    xi = np.zeros_like(centres)
    for a in np.unique(elems):
        sel = np.flatnonzero(elems == a)
        xi[sel], _ = inverse_trilinear_many(space.elements[int(a)], centres[sel])
    return space.basis.tensor_values(xi) * cut.volume[block[0]:block[1], None]


def _coupling_block(block: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    space: SemSpace = _WORKER["space"]
    cut: CutMesh = _WORKER["cut"]
    method: ProjectionMethod = _WORKER["method"]
    if method is ProjectionMethod.QUADRATURE_FREE:
        vals = _qf_block(space, cut, block)
    else:
        vals = _mp_block(space, cut, block)
    n_loc = space.l2g.shape[1]
    rows = space.l2g[cut.acoustic_cell[block[0]:block[1]]].ravel()
    cols = np.repeat(cut.fluid_cell[block[0]:block[1]], n_loc)
    return rows, cols, vals.ravel()


def assemble_coupling(
    space: SemSpace,
    cut: CutMesh,
    method: ProjectionMethod = ProjectionMethod.QUADRATURE_FREE,
    workers: Optional[int] = 1,
    mass: Optional[sparse.csr_matrix] = None,
) -> CouplingSystem:
    """
    Assemble M_aa and M_af for projecting fluid cell data onto the space.

    Records are split into contiguous blocks and summed in record order, so
    the matrices do not depend on the worker count. A precomputed mass
    matrix can be passed in when several cut meshes share one space.
    """
    if cut.acoustic.fingerprint != space.mesh.fingerprint:
        raise InvalidArgumentError("cut mesh was computed for a different acoustic mesh")
    method = ProjectionMethod(method)
    if method is ProjectionMethod.QUADRATURE_FREE:
        touched = np.unique(cut.acoustic_cell)
        bad = [int(a) for a in touched if not space.elements[int(a)].is_affine]
        if bad:
            raise UnsupportedGeometryError(
                f"exact projection needs affine acoustic elements ({len(bad)} are not)", element=bad[0]
            )
    t0 = time.perf_counter()
    n_workers = resolve_workers(workers)
    blocks = contiguous_blocks(len(cut), n_workers)
    _ = (cut.fluid.geometry, space.basis.coefficients)
    results = map_blocks(_coupling_block, blocks, n_workers, initializer=_init_worker, initargs=(space, cut, method))
    rows = np.concatenate([r for r, _, _ in results])
    cols = np.concatenate([c for _, c, _ in results])
    vals = np.concatenate([v for _, _, v in results])
    coupling = sparse.coo_matrix((vals, (rows, cols)), shape=(space.n_nodes, cut.fluid.n_cells)).tocsr()
    if mass is None:
        mass = assemble_mass_matrix(space)
    logger.info(
        "coupling (%s, r=%d): %d records, %d nonzeros in %.2fs",
        method.value,
        space.degree,
        len(cut),
        coupling.nnz,
        time.perf_counter() - t0,
    )
    return CouplingSystem(mass, coupling, space, cut, method)
