"""
Exact integration of monomials over convex polytopes.

Volume integrals reduce to face integrals through Euler's identity for
homogeneous functions. Each face works in an orthonormal in-plane frame
(s, t) centred on the face anchor; the 3D monomial is re-expanded in that
frame and integrated against a per-face table of planar moments. Planar
moments reduce in the same way to edge integrals and then to vertex values.
"""

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from ..models.errors import InvalidArgumentError
from ..models.polytope import Monomial, Polytope


class HomogeneousIntegrator:
    """Integrates monomials over one polytope, reusing planar moment tables."""

    def __init__(
        self,
        polytope: Polytope,
        face_anchors: Optional[np.ndarray] = None,
        edge_anchors: Optional[np.ndarray] = None,
    ):
        self.polytope = polytope
        verts = polytope.vertices
        normals = polytope.normals
        n_faces = polytope.n_faces

        origin = np.array([verts[list(f)].mean(axis=0) for f in polytope.faces])
        first_edge = np.array([verts[f[1]] - verts[f[0]] for f in polytope.faces])
        e1 = first_edge - np.einsum("fd,fd->f", first_edge, normals)[:, None] * normals
        e1 /= np.linalg.norm(e1, axis=1)[:, None]
        e2 = np.cross(normals, e1)
        self._origin, self._e1, self._e2 = origin, e1, e2

        if face_anchors is None:
            anchor2 = np.zeros((n_faces, 2))
        else:
            pts = np.asarray(face_anchors, dtype=float).reshape(n_faces, 3) - origin
            anchor2 = np.stack([np.einsum("fd,fd->f", pts, e1), np.einsum("fd,fd->f", pts, e2)], axis=1)
        self._face_anchor = anchor2

        edge_param = {}
        if edge_anchors is not None:
            params = np.asarray(edge_anchors, dtype=float).reshape(-1)
            if len(params) != len(polytope.edges):
                raise InvalidArgumentError("need one anchor parameter per polytope edge")
            edge_param = {(int(u), int(v)): float(s) for (u, v), s in zip(polytope.edges, params)}

        he_face, p_list, q_list, a_list = [], [], [], []
        for i, cyc in enumerate(polytope.faces):
            rel = verts[list(cyc)] - origin[i]
            uv = np.stack([rel @ e1[i], rel @ e2[i]], axis=1)
            for j in range(len(cyc)):
                k = (j + 1) % len(cyc)
                p, q = uv[j], uv[k]
                lo, hi = min(cyc[j], cyc[k]), max(cyc[j], cyc[k])
                s = edge_param.get((lo, hi), 0.5)
                # the parameter runs from the lower to the higher vertex id
                start, end = (p, q) if cyc[j] == lo else (q, p)
                he_face.append(i)
                p_list.append(p)
                q_list.append(q)
                a_list.append(start + s * (end - start))
        self._he_face = np.asarray(he_face, dtype=np.int64)
        p = np.asarray(p_list).reshape(-1, 2)
        q = np.asarray(q_list).reshape(-1, 2)
        anchor = np.asarray(a_list).reshape(-1, 2)
        delta = q - p
        length = np.linalg.norm(delta, axis=1)
        tangent = delta / length[:, None]
        outward = np.stack([tangent[:, 1], -tangent[:, 0]], axis=1)
        self._p, self._q, self._edge_anchor = p, q, anchor
        self._d_face = np.einsum("hd,hd->h", p - anchor2[self._he_face], outward)
        self._d_p = -np.einsum("hd,hd->h", p - anchor, tangent)
        self._d_q = np.einsum("hd,hd->h", q - anchor, tangent)
        self._face_start = np.searchsorted(self._he_face, np.arange(n_faces))
        self._planar: Optional[np.ndarray] = None

    @property
    def planar_degree(self) -> int:
        return -1 if self._planar is None else self._planar.shape[1] - 1

    def planar_moments(self, degree: int) -> np.ndarray:
        """Table P[f, a, b] = integral of s^a t^b over face f, for a + b <= degree."""
        if degree <= self.planar_degree:
            return self._planar
        D = degree
        n_he = len(self._he_face)
        pw = np.arange(D + 1)
        ps, pt = self._p[:, :1] ** pw, self._p[:, 1:] ** pw
        qs, qt = self._q[:, :1] ** pw, self._q[:, 1:] ** pw
        a_s, a_t = self._edge_anchor[:, 0], self._edge_anchor[:, 1]

        edge = np.zeros((n_he, D + 1, D + 1))
        for n in range(D + 1):
            for a in range(n + 1):
                b = n - a
                val = self._d_p * ps[:, a] * pt[:, b] + self._d_q * qs[:, a] * qt[:, b]
                if a:
                    val = val + a_s * a * edge[:, a - 1, b]
                if b:
                    val = val + a_t * b * edge[:, a, b - 1]
                edge[:, a, b] = val / (n + 1)

        boundary = np.add.reduceat(self._d_face[:, None, None] * edge, self._face_start, axis=0)
        s0, t0 = self._face_anchor[:, 0], self._face_anchor[:, 1]
        planar = np.zeros((self.polytope.n_faces, D + 1, D + 1))
        for n in range(D + 1):
            for a in range(n + 1):
                b = n - a
                val = boundary[:, a, b]
                if a:
                    val = val + s0 * a * planar[:, a - 1, b]
                if b:
                    val = val + t0 * b * planar[:, a, b - 1]
                planar[:, a, b] = val / (n + 2)
        self._planar = planar
        return planar

    def _times_axis(self, poly: np.ndarray, axis: int) -> np.ndarray:
        c0 = self._origin[:, axis][:, None, None]
        c1 = self._e1[:, axis][:, None, None]
        c2 = self._e2[:, axis][:, None, None]
        n = poly.shape[1]
        out = np.zeros((poly.shape[0], n + 1, n + 1))
        out[:, :n, :n] += c0 * poly
        out[:, 1:, :n] += c1 * poly
        out[:, :n, 1:] += c2 * poly
        return out

    def _face_values(self, poly: np.ndarray, planar: np.ndarray) -> np.ndarray:
        n = poly.shape[1]
        return np.einsum("fij,fij->f", poly, planar[:, :n, :n])

    def _volume(self, face_values: np.ndarray, degree: int) -> float:
        return float(np.dot(self.polytope.offsets, face_values) / (degree + 3))

    def face_integrals(self, monomial: Sequence[int]) -> np.ndarray:
        """Integral of the monomial over every face."""
        m = Monomial.parse(monomial)
        planar = self.planar_moments(m.degree)
        poly = np.ones((self.polytope.n_faces, 1, 1))
        for axis, power in enumerate(m):
            for _ in range(power):
                poly = self._times_axis(poly, axis)
        return self._face_values(poly, planar)

    def integrate(self, monomial: Sequence[int]) -> float:
        m = Monomial.parse(monomial)
        return self._volume(self.face_integrals(m), m.degree)

    def moment_tensor(self, order: int) -> np.ndarray:
        """M[a, b, c] = integral of x^a y^b z^c for a, b, c <= order."""
        if order < 0:
            raise InvalidArgumentError("moment order must be non-negative")
        planar = self.planar_moments(3 * order)
        out = np.empty((order + 1, order + 1, order + 1))
        px = np.ones((self.polytope.n_faces, 1, 1))
        for a in range(order + 1):
            pxy = px
            for b in range(order + 1):
                pxyz = pxy
                for c in range(order + 1):
                    out[a, b, c] = self._volume(self._face_values(pxyz, planar), a + b + c)
                    pxyz = self._times_axis(pxyz, 2)
                pxy = self._times_axis(pxy, 1)
            px = self._times_axis(px, 0)
        return out


def integrate_monomial(polytope: Polytope, monomial: Sequence[int]) -> float:
    """Exact integral of x^a y^b z^c over a convex polytope."""
    return HomogeneousIntegrator(polytope).integrate(monomial)


def integrate_polynomial(
    polytope: Polytope,
    terms: Iterable[Tuple[float, Sequence[int]]],
    cache=None,
) -> float:
    """Integral of a sum of coefficient * monomial terms."""
    if cache is not None:
        return float(sum(coef * cache.integrate(polytope, exps) for coef, exps in terms))
    integrator = HomogeneousIntegrator(polytope)
    return float(sum(coef * integrator.integrate(exps) for coef, exps in terms))


def moment_tensor(polytope: Polytope, order: int) -> np.ndarray:
    return HomogeneousIntegrator(polytope).moment_tensor(order)
