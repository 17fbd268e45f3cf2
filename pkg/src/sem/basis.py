from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from ..models.errors import InvalidArgumentError

MAX_DEGREE = 8


def gll_nodes(r: int):
    """
    Gauss-Lobatto-Legendre nodes and weights on [-1, 1], ascending.

    Newton iteration on the Legendre recursion, started from the
    Chebyshev-Gauss-Lobatto points.
    """
    n = r + 1
    x = np.cos(np.pi * np.arange(n) / r)
    vand = np.zeros((n, n))
    for _ in range(100):
        vand[:, 0] = 1.0
        vand[:, 1] = x
        for k in range(1, r):
            vand[:, k + 1] = ((2 * k + 1) * x * vand[:, k] - k * vand[:, k - 1]) / (k + 1)
        step = (x * vand[:, r] - vand[:, r - 1]) / (n * vand[:, r])
        x = x - step
        if np.abs(step).max() <= 1e-16:
            break
    weights = 2.0 / (r * n * vand[:, r] ** 2)
    order = np.argsort(x)
    nodes = x[order]
    nodes[0], nodes[-1] = -1.0, 1.0
    return nodes, weights[order]


def lagrange_values(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """L[p, j] = l_j(points[p]) for the Lagrange polynomials on the nodes."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    diff = pts[:, None] - nodes[None, :]
    n = len(nodes)
    out = np.ones((len(pts), n))
    for j in range(n):
        for k in range(n):
            if k != j:
                out[:, j] *= diff[:, k] / (nodes[j] - nodes[k])
    return out


@dataclass(frozen=True, eq=False)
class GllBasis:
    """1D nodal basis on GLL points; 3D functions are tensor products."""

    degree: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.degree + 1

    @cached_property
    def derivative(self) -> np.ndarray:
        """D[i, j] = l_j'(xi_i)."""
        r, x = self.degree, self.nodes
        leg = np.polynomial.legendre.legval(x, np.eye(r + 1)[r])
        d = np.zeros((r + 1, r + 1))
        for i in range(r + 1):
            for j in range(r + 1):
                if i != j:
                    d[i, j] = leg[i] / (leg[j] * (x[i] - x[j]))
        d[0, 0] = -r * (r + 1) / 4.0
        d[r, r] = r * (r + 1) / 4.0
        return d

    @cached_property
    def coefficients(self) -> np.ndarray:
        """C[j, a] = coefficient of xi^a in l_j."""
        vand = np.vander(self.nodes, self.n_nodes, increasing=True)
        return np.linalg.inv(vand).T

    def values(self, points: np.ndarray) -> np.ndarray:
        return lagrange_values(self.nodes, points)

    def tensor_values(self, points: np.ndarray) -> np.ndarray:
        """phi[p, i + n j + n^2 k] at 3D reference points."""
        pts = np.atleast_2d(points)
        lx, ly, lz = (self.values(pts[:, d]) for d in range(3))
        return np.einsum("pk,pj,pi->pkji", lz, ly, lx).reshape(len(pts), -1)

    def tensor_nodes(self) -> np.ndarray:
        """Reference coordinates of the local nodes in local order."""
        z, y, x = np.meshgrid(self.nodes, self.nodes, self.nodes, indexing="ij")
        return np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)

    def tensor_weights(self) -> np.ndarray:
        w = self.weights
        return np.einsum("k,j,i->kji", w, w, w).reshape(-1)

    def reference_gradients(self) -> np.ndarray:
        """G[d, q, a] = d phi_a / d xi_d at local node q."""
        eye = np.eye(self.n_nodes)
        d = self.derivative
        return np.stack([np.kron(eye, np.kron(eye, d)), np.kron(eye, np.kron(d, eye)), np.kron(d, np.kron(eye, eye))])


@lru_cache(maxsize=None)
def build_basis(r: int) -> GllBasis:
    if not 1 <= r <= MAX_DEGREE:
        raise InvalidArgumentError(f"polynomial degree must lie in [1, {MAX_DEGREE}], got {r}")
    nodes, weights = gll_nodes(r)
    return GllBasis(r, nodes, weights)
