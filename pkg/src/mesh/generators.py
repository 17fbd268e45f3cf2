"""
Structured mesh generators.

All generators return meshes with shared interior faces: the lower-index
cell owns a face (+1) and its neighbour references it reversed (-1).
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..models.errors import GeometryError, InvalidArgumentError
from ..models.mesh import Aabb, PolyMesh
from .validation import validate_mesh

logger = logging.getLogger(__name__)

MAX_DISTORTION = 0.3


def _tuples(arr: np.ndarray) -> Tuple[Tuple[int, ...], ...]:
    return tuple(map(tuple, arr.tolist()))


def generate_cartesian(bounds: Aabb, n: Sequence[int], name: str = "cartesian") -> PolyMesh:
    """Axis-aligned hexahedral grid with n[d] cells along axis d."""
    counts = tuple(int(k) for k in n)
    if len(counts) != 3 or any(k < 1 for k in counts):
        raise InvalidArgumentError(f"cell counts must be 3 positive integers, got {n}")
    if np.any(bounds.extent <= 0.0):
        raise InvalidArgumentError("degenerate bounds")
    nx, ny, nz = counts
    axes = [np.linspace(bounds.min[d], bounds.max[d], counts[d] + 1) for d in range(3)]
    zz, yy, xx = np.meshgrid(axes[2], axes[1], axes[0], indexing="ij")
    vertices = np.stack([xx.ravel(), yy.ravel(), zz.ravel()], axis=1)

    def vid(i, j, k):
        return i + (nx + 1) * (j + (ny + 1) * k)

    # x-faces (normal +x), indexed [k, j, i] with i in 0..nx
    k, j, i = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx + 1), indexing="ij")
    fx = np.stack([vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)], axis=-1)
    k, j, i = np.meshgrid(np.arange(nz), np.arange(ny + 1), np.arange(nx), indexing="ij")
    fy = np.stack([vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)], axis=-1)
    k, j, i = np.meshgrid(np.arange(nz + 1), np.arange(ny), np.arange(nx), indexing="ij")
    fz = np.stack([vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)], axis=-1)
    n_fx, n_fy = fx[..., 0].size, fy[..., 0].size
    faces = np.concatenate([fx.reshape(-1, 4), fy.reshape(-1, 4), fz.reshape(-1, 4)])

    k, j, i = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    x_lo = i + (nx + 1) * (j + ny * k)
    y_lo = n_fx + i + nx * (j + (ny + 1) * k)
    z_lo = n_fx + n_fy + i + nx * (j + ny * k)
    cell_faces = np.stack([x_lo, x_lo + 1, y_lo, y_lo + nx, z_lo, z_lo + nx * ny], axis=-1).reshape(-1, 6)
    signs = np.tile([-1, 1, -1, 1, -1, 1], (len(cell_faces), 1))
    return PolyMesh(vertices, _tuples(faces), _tuples(cell_faces), _tuples(signs), name=name)


def extrude_polygons(
    points: np.ndarray,
    polygons: Sequence[Sequence[int]],
    levels: Sequence[float],
    name: str = "extruded",
) -> PolyMesh:
    """
    Prism mesh from counter-clockwise planar polygons extruded through z levels.

    Polygons index into the shared 2D point array; edges used by two
    polygons become shared interior faces.
    """
    pts2 = np.asarray(points, dtype=float).reshape(-1, 2)
    z = np.asarray(levels, dtype=float)
    if len(z) < 2 or np.any(np.diff(z) <= 0.0):
        raise InvalidArgumentError("extrusion levels must be strictly increasing")
    n2 = len(pts2)
    vertices = np.concatenate([np.column_stack([pts2, np.full(n2, zl)]) for zl in z])

    faces: List[Tuple[int, ...]] = []
    owners: Dict[Tuple[int, ...], int] = {}
    cell_faces: List[Tuple[int, ...]] = []
    cell_signs: List[Tuple[int, ...]] = []

    def add(cycle: Tuple[int, ...]) -> Tuple[int, int]:
        key = tuple(sorted(cycle))
        if key in owners:
            return owners[key], -1
        owners[key] = len(faces)
        faces.append(cycle)
        return owners[key], 1

    for layer in range(len(z) - 1):
        lo, hi = layer * n2, (layer + 1) * n2
        for poly in polygons:
            p = [int(v) for v in poly]
            fs, ss = [], []
            for f, s in (add(tuple(lo + v for v in reversed(p))), add(tuple(hi + v for v in p))):
                fs.append(f)
                ss.append(s)
            for a, b in zip(p, p[1:] + p[:1]):
                f, s = add((lo + a, lo + b, hi + b, hi + a))
                fs.append(f)
                ss.append(s)
            cell_faces.append(tuple(fs))
            cell_signs.append(tuple(ss))

    return PolyMesh(vertices, tuple(faces), tuple(cell_faces), tuple(cell_signs), name=name)


def generate_o_grid(
    half_width: float,
    block_cells: int,
    outer_radius: float,
    rings: int,
    thickness: float = 1.0,
    name: str = "o-grid",
) -> PolyMesh:
    """
    Square Cartesian block surrounded by rings reaching a circle.

    Ring nodes lie on rays through the block perimeter nodes, so every
    quadrilateral stays convex. The mesh is one element thick in z.
    """
    if half_width <= 0 or outer_radius <= np.sqrt(2.0) * half_width:
        raise InvalidArgumentError("outer radius must exceed the block's half diagonal")
    if block_cells < 1 or rings < 1 or thickness <= 0:
        raise InvalidArgumentError("block_cells, rings and thickness must be positive")
    n = int(block_cells)
    xs = np.linspace(-half_width, half_width, n + 1)
    gx, gy = np.meshgrid(xs, xs, indexing="xy")
    points = [np.column_stack([gx.ravel(), gy.ravel()])]

    def bid(i, j):
        return i + (n + 1) * j

    polygons = [
        (bid(i, j), bid(i + 1, j), bid(i + 1, j + 1), bid(i, j + 1)) for j in range(n) for i in range(n)
    ]

    # block perimeter, counter-clockwise from the (-a, -a) corner
    perimeter = (
        [bid(i, 0) for i in range(n)]
        + [bid(n, j) for j in range(n)]
        + [bid(i, n) for i in range(n, 0, -1)]
        + [bid(0, j) for j in range(n, 0, -1)]
    )
    base = points[0][perimeter]
    direction = base / np.linalg.norm(base, axis=1)[:, None]
    m = len(perimeter)
    ring_ids = [np.asarray(perimeter)]
    offset = len(points[0])
    for r in range(1, rings + 1):
        beta = r / rings
        layer = (1.0 - beta) * base + beta * outer_radius * direction
        points.append(layer)
        ring_ids.append(offset + np.arange(m))
        offset += m
    for r in range(rings):
        inner, outer = ring_ids[r], ring_ids[r + 1]
        for k in range(m):
            k1 = (k + 1) % m
            polygons.append((int(inner[k]), int(outer[k]), int(outer[k1]), int(inner[k1])))
    return extrude_polygons(np.concatenate(points), polygons, [-0.5 * thickness, 0.5 * thickness], name=name)


def submesh(mesh: PolyMesh, keep: np.ndarray, name: str = "") -> PolyMesh:
    """Cells selected by a boolean mask, with faces and vertices renumbered."""
    mask = np.asarray(keep, dtype=bool)
    if mask.shape != (mesh.n_cells,):
        raise InvalidArgumentError("cell mask must have one entry per cell")
    cells = np.flatnonzero(mask)
    face_map: Dict[int, int] = {}
    vert_map: Dict[int, int] = {}
    faces, cell_faces, cell_signs = [], [], []
    for c in cells:
        fs = []
        for f in mesh.cell_faces[c]:
            if f not in face_map:
                face_map[f] = len(faces)
                cyc = []
                for v in mesh.faces[f]:
                    if v not in vert_map:
                        vert_map[v] = len(vert_map)
                    cyc.append(vert_map[v])
                faces.append(tuple(cyc))
            fs.append(face_map[f])
        cell_faces.append(tuple(fs))
        cell_signs.append(mesh.cell_signs[c])
    order = np.empty(len(vert_map), dtype=np.int64)
    for old, new in vert_map.items():
        order[new] = old
    return PolyMesh(
        mesh.vertices[order], tuple(faces), tuple(cell_faces), tuple(cell_signs), name=name or mesh.name
    )


def restrict_to_disk(mesh: PolyMesh, radius: float, center: Sequence[float] = (0.0, 0.0)) -> PolyMesh:
    """Keep the cells whose centroid lies within a radius of an axis parallel to z."""
    xy = mesh.geometry.cell_centroid[:, :2] - np.asarray(center, dtype=float)
    return submesh(mesh, np.hypot(xy[:, 0], xy[:, 1]) <= radius, name=f"{mesh.name}-disk")


def _lattice(mesh: PolyMesh) -> Tuple[List[np.ndarray], np.ndarray]:
    axes, index = [], []
    for d in range(3):
        vals, inv = np.unique(mesh.vertices[:, d], return_inverse=True)
        axes.append(vals)
        index.append(inv)
    idx = np.stack(index, axis=1)
    size = np.prod([len(a) for a in axes])
    if size != mesh.n_vertices or len(np.unique(idx, axis=0)) != mesh.n_vertices:
        raise InvalidArgumentError("distortion needs a structured tensor-product base mesh")
    return axes, idx


def generate_distorted(base: PolyMesh, amplitude: float, seed: int) -> PolyMesh:
    """
    Randomly perturb the interior nodes of a structured hexahedral grid.

    Only axes with more than one cell are perturbed and nodes move as whole
    columns along the others, so extruded meshes keep planar faces. Boundary
    nodes stay put. On a convexity failure the perturbation is retried once
    with half the amplitude.
    """
    if not 0.0 <= amplitude < MAX_DISTORTION:
        raise InvalidArgumentError(f"amplitude must lie in [0, {MAX_DISTORTION}), got {amplitude}")
    axes, idx = _lattice(base)
    moving = [d for d in range(3) if len(axes[d]) > 2]
    if amplitude == 0.0 or not moving:
        return PolyMesh(base.vertices.copy(), base.faces, base.cell_faces, base.cell_signs, name=base.name)

    h = min(float(np.diff(axes[d]).min()) for d in moving)
    shape = tuple(len(axes[d]) for d in moving)
    interior = np.ones(shape, dtype=bool)
    for a, d in enumerate(moving):
        sl = [slice(None)] * len(moving)
        sl[a] = [0, -1]
        interior[tuple(sl)] = False
    column = tuple(idx[:, d] for d in moving)

    current = amplitude
    for attempt in range(2):
        rng = np.random.default_rng(seed)
        disp = current * h * rng.uniform(-1.0, 1.0, size=shape + (len(moving),))
        disp[~interior] = 0.0
        vertices = base.vertices.copy()
        vertices[:, moving] += disp[column]
        mesh = PolyMesh(vertices, base.faces, base.cell_faces, base.cell_signs, name=f"{base.name}-distorted")
        try:
            validate_mesh(mesh)
            return mesh
        except GeometryError as exc:
            logger.warning("distortion %.3g failed validation (%s)", current, exc)
            current *= 0.5
    raise GeometryError(f"distorted mesh is not convex even at amplitude {current * 2:.3g}")
