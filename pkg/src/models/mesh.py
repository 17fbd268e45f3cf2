from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Iterator, Optional, Sequence, Tuple

import hashlib
import numpy as np

from .errors import InvalidArgumentError

if TYPE_CHECKING:
    from ..mesh.geometry import MeshGeometry


# Reference corner order of the trilinear hexahedron.
HEX_REFERENCE_CORNERS = np.array(
    [
        [-1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0],
        [1.0, 1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0],
    ]
)

# Corner indices of the six local faces: xi-, xi+, eta-, eta+, zeta-, zeta+.
HEX_LOCAL_FACES = (
    (0, 3, 4, 7),
    (1, 2, 5, 6),
    (0, 1, 4, 5),
    (2, 3, 6, 7),
    (0, 1, 2, 3),
    (4, 5, 6, 7),
)


class CellKind(str, Enum):
    HEXAHEDRAL = "hexahedral"
    GENERAL = "general-polyhedral"


class ProjectionMethod(str, Enum):
    QUADRATURE_FREE = "QF"
    MIDPOINT = "MP"


class Provenance(str, Enum):
    CONTAINED = "contained"
    CLIPPED = "clipped"


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box with closed-interval overlap semantics."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.min, dtype=float).reshape(3)
        hi = np.asarray(self.max, dtype=float).reshape(3)
        if np.any(lo > hi):
            raise InvalidArgumentError(f"AABB min {lo} exceeds max {hi}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @classmethod
    def from_points(cls, points: np.ndarray) -> "Aabb":
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        return cls(pts.min(axis=0), pts.max(axis=0))

    @property
    def extent(self) -> np.ndarray:
        return self.max - self.min

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min + self.max)

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def overlaps(self, other: "Aabb") -> bool:
        return bool(np.all(self.min <= other.max) and np.all(other.min <= self.max))

    def corners(self) -> np.ndarray:
        return self.center + 0.5 * HEX_REFERENCE_CORNERS * self.extent


@dataclass(frozen=True, eq=False)
class PolyMesh:
    """
    Unstructured polyhedral mesh.

    Faces are vertex cycles. A cell lists its faces together with an
    orientation sign: +1 means the stored cycle's right-hand normal points
    out of the cell, -1 means the reversed cycle does.
    """

    vertices: np.ndarray
    faces: Tuple[Tuple[int, ...], ...]
    cell_faces: Tuple[Tuple[int, ...], ...]
    cell_signs: Tuple[Tuple[int, ...], ...]
    name: str = field(default="mesh", compare=False)

    def __post_init__(self):
        verts = np.ascontiguousarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise InvalidArgumentError("vertices must be an (n, 3) array")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        if len(self.cell_faces) != len(self.cell_signs):
            raise InvalidArgumentError("cell_faces and cell_signs differ in length")
        for c, (fs, ss) in enumerate(zip(self.cell_faces, self.cell_signs)):
            if len(fs) != len(ss):
                raise InvalidArgumentError(f"cell {c} has {len(fs)} faces but {len(ss)} signs")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_cells(self) -> int:
        return len(self.cell_faces)

    def __len__(self) -> int:
        return self.n_cells

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMesh):
            return NotImplemented
        return (
            self.vertices.shape == other.vertices.shape
            and bool(np.array_equal(self.vertices, other.vertices))
            and self.faces == other.faces
            and self.cell_faces == other.cell_faces
            and self.cell_signs == other.cell_signs
        )

    __hash__ = None  # type: ignore[assignment]

    def oriented_faces(self, cell: int) -> Iterator[Tuple[int, ...]]:
        """Vertex cycles of a cell, each oriented outward."""
        for f, s in zip(self.cell_faces[cell], self.cell_signs[cell]):
            cycle = self.faces[f]
            yield cycle if s > 0 else tuple(reversed(cycle))

    def cell_vertex_ids(self, cell: int) -> np.ndarray:
        ids = set()
        for f in self.cell_faces[cell]:
            ids.update(self.faces[f])
        return np.array(sorted(ids), dtype=np.int64)

    @cached_property
    def fingerprint(self) -> str:
        """Content hash; fields on this mesh refer to it by this value."""
        digest = hashlib.blake2b(digest_size=16)
        digest.update(self.vertices.tobytes())
        digest.update(repr(self.faces).encode())
        digest.update(repr(self.cell_faces).encode())
        digest.update(repr(self.cell_signs).encode())
        return digest.hexdigest()

    @cached_property
    def geometry(self) -> "MeshGeometry":
        from ..mesh.geometry import compute_geometry

        return compute_geometry(self)

    @cached_property
    def kind(self) -> CellKind:
        for c in range(self.n_cells):
            if len(self.cell_faces[c]) != 6:
                return CellKind.GENERAL
            if any(len(self.faces[f]) != 4 for f in self.cell_faces[c]):
                return CellKind.GENERAL
            if len(self.cell_vertex_ids(c)) != 8:
                return CellKind.GENERAL
        return CellKind.HEXAHEDRAL

    def cell_aabb(self, cell: int) -> Aabb:
        geo = self.geometry
        return Aabb(geo.cell_min[cell], geo.cell_max[cell])

    def bounds(self) -> Aabb:
        return Aabb.from_points(self.vertices)


@dataclass(frozen=True, eq=False)
class HexElement:
    """Trilinear hexahedron in the reference corner order."""

    corners: np.ndarray
    corner_ids: Optional[Tuple[int, ...]] = None
    index: int = -1

    def __post_init__(self):
        pts = np.asarray(self.corners, dtype=float)
        if pts.shape != (8, 3):
            raise InvalidArgumentError("a hexahedral element needs 8 corners")
        object.__setattr__(self, "corners", pts)

    @cached_property
    def coefficients(self) -> np.ndarray:
        """Rows a0..a7 of x = a0 + a1 xi + a2 eta + a3 zeta + a4 xi eta + a5 eta zeta + a6 xi zeta + a7 xi eta zeta."""
        return _TRILINEAR_INVERSE @ self.corners

    @cached_property
    def diameter(self) -> float:
        diff = self.corners[:, None, :] - self.corners[None, :, :]
        return float(np.sqrt((diff**2).sum(axis=-1)).max())

    @cached_property
    def is_affine(self) -> bool:
        tol = 1e-12 * self.diameter
        return bool(np.abs(self.coefficients[4:]).max() <= tol)

    @property
    def center(self) -> np.ndarray:
        return self.coefficients[0]

    @property
    def affine_matrix(self) -> np.ndarray:
        """Constant Jacobian of an affine element, columns d x / d xi_d."""
        return self.coefficients[1:4].T.copy()

    def map(self, xi: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(xi, dtype=float))
        return trilinear_shape(pts) @ self.corners

    def jacobian(self, xi: np.ndarray) -> np.ndarray:
        """Jacobians J[n, x, d] = d x_x / d xi_d at reference points."""
        pts = np.atleast_2d(np.asarray(xi, dtype=float))
        return np.einsum("ncd,cx->nxd", trilinear_shape_gradient(pts), self.corners)


def trilinear_shape(xi: np.ndarray) -> np.ndarray:
    """Corner shape functions at reference points, shape (n, 8)."""
    pts = np.atleast_2d(xi)
    ref = HEX_REFERENCE_CORNERS
    return 0.125 * np.prod(1.0 + pts[:, None, :] * ref[None, :, :], axis=-1)


def trilinear_shape_gradient(xi: np.ndarray) -> np.ndarray:
    """Gradients of the corner shape functions, shape (n, 8, 3)."""
    pts = np.atleast_2d(xi)
    ref = HEX_REFERENCE_CORNERS
    lin = 1.0 + pts[:, None, :] * ref[None, :, :]
    grad = np.empty((len(pts), 8, 3))
    for d in range(3):
        others = [e for e in range(3) if e != d]
        grad[:, :, d] = 0.125 * ref[None, :, d] * lin[:, :, others[0]] * lin[:, :, others[1]]
    return grad


def _trilinear_basis(ref: np.ndarray) -> np.ndarray:
    x, y, z = ref[:, 0], ref[:, 1], ref[:, 2]
    return np.stack([np.ones_like(x), x, y, z, x * y, y * z, x * z, x * y * z], axis=1)


_TRILINEAR_INVERSE = np.linalg.inv(_trilinear_basis(HEX_REFERENCE_CORNERS))


@dataclass(frozen=True, eq=False)
class CellField:
    """Per-cell values bound to one mesh."""

    mesh_ref: str
    values: np.ndarray

    @classmethod
    def on(cls, mesh: PolyMesh, values: Sequence) -> "CellField":
        arr = np.asarray(values, dtype=float)
        if arr.shape[0] != mesh.n_cells:
            raise InvalidArgumentError(
                f"field has {arr.shape[0]} rows but mesh has {mesh.n_cells} cells"
            )
        return cls(mesh.fingerprint, arr)

    def check(self, mesh: PolyMesh) -> np.ndarray:
        if self.mesh_ref != mesh.fingerprint or self.values.shape[0] != mesh.n_cells:
            raise InvalidArgumentError("cell field does not belong to this mesh")
        return self.values

    def __len__(self) -> int:
        return self.values.shape[0]
