"""
Vectorised per-face and per-cell geometry of a PolyMesh.

Faces are grouped by vertex count so every quantity is computed with array
operations; cells are handled through the flat list of (cell, face, sign)
incidences.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..models.mesh import PolyMesh


@dataclass(frozen=True, eq=False)
class MeshGeometry:
    face_area: np.ndarray
    face_normal: np.ndarray
    face_centroid: np.ndarray
    face_cells: np.ndarray  # (F, 2), -1 where a face has a single cell
    incidence_cell: np.ndarray
    incidence_face: np.ndarray
    incidence_sign: np.ndarray
    cell_volume: np.ndarray
    cell_centroid: np.ndarray
    cell_min: np.ndarray
    cell_max: np.ndarray

    @property
    def cell_diameter(self) -> np.ndarray:
        return np.linalg.norm(self.cell_max - self.cell_min, axis=1)

    @property
    def boundary_faces(self) -> np.ndarray:
        return np.flatnonzero(self.face_cells[:, 1] < 0)

    @property
    def axis_aligned(self) -> np.ndarray:
        """Cells that fill their bounding box."""
        box_volume = np.prod(self.cell_max - self.cell_min, axis=1)
        return np.abs(box_volume - self.cell_volume) <= 1e-12 * box_volume


def faces_by_size(mesh: PolyMesh) -> Dict[int, Tuple[np.ndarray, np.ndarray]]:
    """Map vertex count k -> (face ids, (n, k) vertex index array)."""
    groups: Dict[int, list] = {}
    for f, cyc in enumerate(mesh.faces):
        groups.setdefault(len(cyc), []).append(f)
    out = {}
    for k, ids in groups.items():
        ids_arr = np.asarray(ids, dtype=np.int64)
        out[k] = (ids_arr, np.array([mesh.faces[f] for f in ids], dtype=np.int64).reshape(-1, k))
    return out


def incidences(mesh: PolyMesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    counts = np.fromiter((len(fs) for fs in mesh.cell_faces), dtype=np.int64, count=mesh.n_cells)
    cell = np.repeat(np.arange(mesh.n_cells), counts)
    face = np.fromiter((f for fs in mesh.cell_faces for f in fs), dtype=np.int64, count=int(counts.sum()))
    sign = np.fromiter((s for ss in mesh.cell_signs for s in ss), dtype=np.int64, count=int(counts.sum()))
    return cell, face, sign


def compute_geometry(mesh: PolyMesh) -> MeshGeometry:
    verts = mesh.vertices
    n_faces = mesh.n_faces
    area_vec = np.zeros((n_faces, 3))
    centroid = np.zeros((n_faces, 3))
    tri_face, tri_pts = [], []

    for k, (ids, idx) in faces_by_size(mesh).items():
        pts = verts[idx]  # (n, k, 3)
        area_vec[ids] = 0.5 * np.cross(pts, np.roll(pts, -1, axis=1)).sum(axis=1)
        # fan triangles about the first vertex
        p0 = pts[:, :1, :]
        a = pts[:, 1:-1, :]
        b = pts[:, 2:, :]
        tri_area = 0.5 * np.linalg.norm(np.cross(a - p0, b - p0), axis=-1)
        tri_cent = (p0 + a + b) / 3.0
        total = tri_area.sum(axis=1)
        safe = np.where(total > 0, total, 1.0)
        centroid[ids] = np.where(
            (total > 0)[:, None],
            (tri_area[..., None] * tri_cent).sum(axis=1) / safe[:, None],
            pts.mean(axis=1),
        )
        tri_face.append(np.repeat(ids, k - 2))
        tri_pts.append(np.stack([np.broadcast_to(p0, a.shape), a, b], axis=2).reshape(-1, 3, 3))

    area = np.linalg.norm(area_vec, axis=1)
    normal = area_vec / np.where(area > 0, area, 1.0)[:, None]

    cell, face, sign = incidences(mesh)
    face_cells = np.full((n_faces, 2), -1, dtype=np.int64)
    # owner (+1) goes in column 0; a face seen only with -1 still gets a column-0 cell
    order = np.lexsort((-sign, face))
    f_sorted = face[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = f_sorted[1:] != f_sorted[:-1]
    face_cells[f_sorted[first], 0] = cell[order][first]
    face_cells[f_sorted[~first], 1] = cell[order][~first]

    # cell bounding boxes over the vertices of all incident faces
    fv_counts = np.fromiter((len(mesh.faces[f]) for f in face), dtype=np.int64, count=len(face))
    fv_cell = np.repeat(cell, fv_counts)
    fv_vert = np.fromiter((v for f in face for v in mesh.faces[f]), dtype=np.int64, count=int(fv_counts.sum()))
    order = np.argsort(fv_cell, kind="stable")
    starts = np.searchsorted(fv_cell[order], np.arange(mesh.n_cells))
    cell_pts = verts[fv_vert[order]]
    cell_min = np.minimum.reduceat(cell_pts, starts, axis=0)
    cell_max = np.maximum.reduceat(cell_pts, starts, axis=0)
    cell_ref = np.add.reduceat(cell_pts, starts, axis=0) / np.diff(np.append(starts, len(order)))[:, None]

    # signed tetrahedra against each cell's vertex average
    tri_face_all = np.concatenate(tri_face) if tri_face else np.zeros(0, dtype=np.int64)
    tri_pts_all = np.concatenate(tri_pts) if tri_pts else np.zeros((0, 3, 3))
    tri_order = np.argsort(tri_face_all, kind="stable")
    tri_face_all = tri_face_all[tri_order]
    tri_pts_all = tri_pts_all[tri_order]
    tri_start = np.searchsorted(tri_face_all, np.arange(n_faces))
    tri_count = np.bincount(tri_face_all, minlength=n_faces)

    inc_tri_count = tri_count[face]
    inc_rep = np.repeat(np.arange(len(face)), inc_tri_count)
    offsets = np.arange(len(inc_rep)) - np.repeat(np.cumsum(inc_tri_count) - inc_tri_count, inc_tri_count)
    tri_idx = tri_start[face][inc_rep] + offsets
    tp = tri_pts_all[tri_idx]
    ref = cell_ref[cell[inc_rep]]
    tet_vol = sign[inc_rep] * np.einsum(
        "ij,ij->i", tp[:, 0] - ref, np.cross(tp[:, 1] - ref, tp[:, 2] - ref)
    ) / 6.0
    tet_cent = (ref + tp.sum(axis=1)) / 4.0
    owner = cell[inc_rep]
    volume = np.bincount(owner, weights=tet_vol, minlength=mesh.n_cells)
    first = np.stack(
        [np.bincount(owner, weights=tet_vol * tet_cent[:, d], minlength=mesh.n_cells) for d in range(3)],
        axis=1,
    )
    cell_centroid = np.where(
        (np.abs(volume) > 0)[:, None], first / np.where(volume != 0, volume, 1.0)[:, None], cell_ref
    )

    return MeshGeometry(
        face_area=area,
        face_normal=normal,
        face_centroid=centroid,
        face_cells=face_cells,
        incidence_cell=cell,
        incidence_face=face,
        incidence_sign=sign,
        cell_volume=volume,
        cell_centroid=cell_centroid,
        cell_min=cell_min,
        cell_max=cell_max,
    )
