from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Tuple

import hashlib
import numpy as np

from .errors import InvalidArgumentError
from .mesh import Aabb


class Monomial(NamedTuple):
    """x^a y^b z^c."""

    a: int
    b: int
    c: int

    @property
    def degree(self) -> int:
        return self.a + self.b + self.c

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        return pts[:, 0] ** self.a * pts[:, 1] ** self.b * pts[:, 2] ** self.c

    @classmethod
    def parse(cls, exps: Sequence[int]) -> "Monomial":
        if len(exps) != 3 or any(int(e) < 0 for e in exps):
            raise InvalidArgumentError(f"monomial exponents must be 3 non-negative ints, got {exps}")
        return cls(*(int(e) for e in exps))


def newell_vectors(vertices: np.ndarray, cycles: Sequence[Sequence[int]]) -> np.ndarray:
    """Area vectors of vertex cycles (half the Newell sum)."""
    out = np.zeros((len(cycles), 3))
    for i, cyc in enumerate(cycles):
        pts = vertices[list(cyc)]
        out[i] = 0.5 * np.cross(pts, np.roll(pts, -1, axis=0)).sum(axis=0)
    return out


@dataclass(frozen=True, eq=False)
class Polytope:
    """
    Closed convex polytope in boundary representation.

    Faces are vertex cycles ordered counter-clockwise around the outward
    normal; the face planes are n_i . x = b_i.
    """

    vertices: np.ndarray
    faces: Tuple[Tuple[int, ...], ...]
    normals: np.ndarray
    offsets: np.ndarray

    @classmethod
    def from_faces(cls, vertices: np.ndarray, faces: Sequence[Sequence[int]]) -> "Polytope":
        verts = np.asarray(vertices, dtype=float).reshape(-1, 3)
        cycles = tuple(tuple(int(v) for v in f) for f in faces)
        if len(cycles) < 4:
            raise InvalidArgumentError("a closed polytope needs at least 4 faces")
        area = newell_vectors(verts, cycles)
        norm = np.linalg.norm(area, axis=1)
        if np.any(norm <= 0.0):
            raise InvalidArgumentError("degenerate face in polytope")
        normals = area / norm[:, None]
        anchors = np.array([verts[list(c)].mean(axis=0) for c in cycles])
        offsets = np.einsum("ij,ij->i", normals, anchors)
        return cls(verts, cycles, normals, offsets)

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "Polytope":
        aabb = Aabb(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        faces = ((0, 4, 7, 3), (1, 2, 6, 5), (0, 1, 5, 4), (2, 3, 7, 6), (0, 3, 2, 1), (4, 5, 6, 7))
        return cls.from_faces(aabb.corners(), faces)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def face_areas(self) -> np.ndarray:
        return np.linalg.norm(newell_vectors(self.vertices, self.faces), axis=1)

    @cached_property
    def edges(self) -> np.ndarray:
        """Undirected edges as sorted vertex pairs."""
        pairs = set()
        for cyc in self.faces:
            for i, v in enumerate(cyc):
                w = cyc[(i + 1) % len(cyc)]
                pairs.add((min(v, w), max(v, w)))
        return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)

    @cached_property
    def volume(self) -> float:
        return float(self._moments[0])

    @cached_property
    def centroid(self) -> np.ndarray:
        return self._moments[1:] / self._moments[0]

    @cached_property
    def _moments(self) -> np.ndarray:
        # Fan each face into triangles and sum signed tetrahedra against an interior point.
        ref = self.vertices[sorted({v for f in self.faces for v in f})].mean(axis=0)
        vol = 0.0
        first = np.zeros(3)
        for cyc in self.faces:
            p0 = self.vertices[cyc[0]]
            for k in range(1, len(cyc) - 1):
                p1 = self.vertices[cyc[k]]
                p2 = self.vertices[cyc[k + 1]]
                v = np.dot(p0 - ref, np.cross(p1 - ref, p2 - ref)) / 6.0
                vol += v
                first += v * (ref + p0 + p1 + p2) / 4.0
        return np.concatenate([[vol], first])

    @cached_property
    def aabb(self) -> Aabb:
        return Aabb.from_points(self.vertices)

    @cached_property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.aabb.extent))

    def euler_characteristic(self) -> int:
        used = {v for f in self.faces for v in f}
        return len(used) - len(self.edges) + len(self.faces)

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(points)
        s = pts @ self.normals.T - self.offsets
        return np.all(s <= tol * max(self.diameter, 1.0), axis=1)

    def is_convex(self, tol: float = 1e-9) -> bool:
        s = self.vertices @ self.normals.T - self.offsets
        return bool(np.all(s <= tol * self.diameter))

    def affine_image(self, matrix: np.ndarray, origin: Optional[np.ndarray] = None) -> "Polytope":
        """Image under x -> matrix @ (x - origin); orientation is kept for det(matrix) > 0."""
        shift = np.zeros(3) if origin is None else np.asarray(origin, dtype=float)
        verts = (self.vertices - shift) @ np.asarray(matrix, dtype=float).T
        faces = self.faces
        if np.linalg.det(matrix) < 0:
            faces = tuple(tuple(reversed(f)) for f in faces)
        return Polytope.from_faces(verts, faces)

    def translated(self, shift: Sequence[float]) -> "Polytope":
        return self.affine_image(np.eye(3), -np.asarray(shift, dtype=float))

    def cache_key(self, quantum: float = 1e-15) -> str:
        """Content hash of the quantized geometry."""
        q = np.rint(self.vertices / quantum)
        digest = hashlib.blake2b(digest_size=16)
        if np.all(np.abs(q) < 2**62):
            digest.update(q.astype(np.int64).tobytes())
        else:
            digest.update(self.vertices.tobytes())
        digest.update(repr(self.faces).encode())
        return digest.hexdigest()
