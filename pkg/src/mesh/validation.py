import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from ..models.errors import GeometryError
from ..models.mesh import PolyMesh
from .geometry import faces_by_size

logger = logging.getLogger(__name__)

EPS_PLANAR = 1e-10
EPS_CLOSED = 1e-10
EPS_CONVEX = 1e-9


class MeshTolerances(BaseModel):
    planar: float = Field(default=EPS_PLANAR, gt=0)
    closed: float = Field(default=EPS_CLOSED, gt=0)
    convex: float = Field(default=EPS_CONVEX, gt=0)


class MeshReport(BaseModel):
    """Outcome of validating one mesh."""
    n_vertices: int
    n_faces: int
    n_cells: int
    cell_kind: str
    volume: float
    min_cell_volume: float
    max_planarity: float = 0.0
    max_closure: float = 0.0
    max_convexity: float = 0.0
    split_faces: int = 0
    valid: bool = True
    first_error: Optional[str] = None


def face_planarity(mesh: PolyMesh) -> np.ndarray:
    """Max vertex distance to the Newell plane, relative to the face diameter."""
    geo = mesh.geometry
    out = np.zeros(mesh.n_faces)
    for k, (ids, idx) in faces_by_size(mesh).items():
        if k == 3:
            continue
        pts = mesh.vertices[idx]
        rel = pts - geo.face_centroid[ids][:, None, :]
        dist = np.abs(np.einsum("nkd,nd->nk", rel, geo.face_normal[ids])).max(axis=1)
        diam = np.linalg.norm(pts.max(axis=1) - pts.min(axis=1), axis=1)
        out[ids] = dist / np.where(diam > 0, diam, 1.0)
    return out


def validate_mesh(
    mesh: PolyMesh,
    tolerances: Optional[MeshTolerances] = None,
    strict: bool = True,
) -> MeshReport:
    """
    Check face, closure, convexity and volume invariants.

    With strict=True the first violation raises GeometryError naming the
    offending face or cell; otherwise it is recorded in the report.
    """
    tol = tolerances or MeshTolerances()
    geo = mesh.geometry
    diam = geo.cell_diameter
    report = MeshReport(
        n_vertices=mesh.n_vertices,
        n_faces=mesh.n_faces,
        n_cells=mesh.n_cells,
        cell_kind=mesh.kind.value,
        volume=float(geo.cell_volume.sum()),
        min_cell_volume=float(geo.cell_volume.min()) if mesh.n_cells else 0.0,
    )

    def fail(message: str, **ids) -> MeshReport:
        err = GeometryError(message, **ids)
        if strict:
            raise err
        logger.warning("mesh %s invalid: %s", mesh.name, err)
        report.valid = False
        report.first_error = str(err)
        return report

    for f, cyc in enumerate(mesh.faces):
        if len(cyc) < 3:
            return fail("face has fewer than 3 vertices", face=f)
        if any(cyc[i] == cyc[(i + 1) % len(cyc)] for i in range(len(cyc))):
            return fail("face repeats a vertex consecutively", face=f)
        if max(cyc) >= mesh.n_vertices or min(cyc) < 0:
            return fail("face references a missing vertex", face=f)

    use = np.bincount(geo.incidence_face, minlength=mesh.n_faces)
    if np.any(use > 2):
        return fail("face shared by more than two cells", face=int(np.argmax(use > 2)))
    for c, fs in enumerate(mesh.cell_faces):
        if len(fs) < 4:
            return fail("cell has fewer than 4 faces", cell=c)

    planar = face_planarity(mesh)
    report.max_planarity = float(planar.max()) if len(planar) else 0.0
    bad = planar > tol.planar
    quads = np.array([len(c) == 4 for c in mesh.faces], dtype=bool)
    report.split_faces = int(np.count_nonzero(bad & quads))
    if np.any(bad & ~quads):
        return fail("non-planar face", face=int(np.flatnonzero(bad & ~quads)[0]))

    # closure: outward area vectors of a cell sum to zero
    area_vec = geo.face_normal * geo.face_area[:, None]
    signed = area_vec[geo.incidence_face] * geo.incidence_sign[:, None]
    closure = np.stack(
        [np.bincount(geo.incidence_cell, weights=signed[:, d], minlength=mesh.n_cells) for d in range(3)],
        axis=1,
    )
    closure_rel = np.linalg.norm(closure, axis=1) / np.maximum(diam, 1e-300) ** 2
    report.max_closure = float(closure_rel.max()) if mesh.n_cells else 0.0
    if np.any(closure_rel > tol.closed):
        return fail("cell is not closed", cell=int(np.argmax(closure_rel > tol.closed)))

    if np.any(geo.cell_volume <= 0.0):
        return fail("cell has non-positive volume", cell=int(np.argmax(geo.cell_volume <= 0.0)))

    convex = cell_convexity(mesh)
    report.max_convexity = float(convex.max()) if mesh.n_cells else 0.0
    if np.any(convex > tol.convex):
        return fail("cell is not convex", cell=int(np.argmax(convex > tol.convex)))

    return report


def cell_convexity(mesh: PolyMesh) -> np.ndarray:
    """Largest relative distance of a cell vertex outside one of its face planes."""
    geo = mesh.geometry
    cell_verts = [mesh.cell_vertex_ids(c) for c in range(mesh.n_cells)]
    n_verts = np.fromiter((len(v) for v in cell_verts), dtype=np.int64, count=mesh.n_cells)
    flat_verts = np.concatenate(cell_verts) if cell_verts else np.zeros(0, dtype=np.int64)
    vert_start = np.cumsum(n_verts) - n_verts

    inc_cell = geo.incidence_cell
    rep = n_verts[inc_cell]
    inc_idx = np.repeat(np.arange(len(inc_cell)), rep)
    local = np.arange(len(inc_idx)) - np.repeat(np.cumsum(rep) - rep, rep)
    verts = flat_verts[vert_start[inc_cell][inc_idx] + local]

    f = geo.incidence_face[inc_idx]
    normal = geo.face_normal[f] * geo.incidence_sign[inc_idx][:, None]
    dist = np.einsum("nd,nd->n", mesh.vertices[verts] - geo.face_centroid[f], normal)
    # corners of a warped quadrilateral sit off its mean plane
    quads = faces_by_size(mesh).get(4)
    if quads is not None:
        row = np.full(mesh.n_faces, -1, dtype=np.int64)
        row[quads[0]] = np.arange(len(quads[0]))
        sel = np.flatnonzero(row[f] >= 0)
        own = (quads[1][row[f[sel]]] == verts[sel, None]).any(axis=1)
        dist[sel[own]] = -np.inf
    worst = np.full(mesh.n_cells, -np.inf)
    np.maximum.at(worst, inc_cell[inc_idx], dist)
    return worst / np.maximum(geo.cell_diameter, 1e-300)
