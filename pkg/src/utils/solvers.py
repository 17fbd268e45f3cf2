"""Sparse SPD solves: Jacobi-preconditioned CG and cached direct factorisations."""

import logging
from typing import Callable, List, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, cg, splu

from ..models.errors import InvalidArgumentError, SolverError

logger = logging.getLogger(__name__)

SOLVERS = ("cg", "direct")


def jacobi_cg(
    matrix: sparse.spmatrix,
    rhs: np.ndarray,
    rtol: float = 1e-10,
    maxiter: Optional[int] = None,
    x0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Conjugate gradients with a diagonal preconditioner; raises SolverError with the residual history."""
    b = np.asarray(rhs, dtype=float)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b)
    diag = matrix.diagonal()
    if np.any(diag <= 0.0):
        raise SolverError("matrix diagonal is not positive")
    precond = LinearOperator(matrix.shape, matvec=lambda v: v / diag, dtype=float)
    history: List[float] = []

    def record(xk: np.ndarray) -> None:
        history.append(float(np.linalg.norm(b - matrix @ xk)) / b_norm)

    x, info = cg(matrix, b, x0=x0, rtol=rtol, atol=0.0, maxiter=maxiter, M=precond, callback=record)
    residual = float(np.linalg.norm(b - matrix @ x)) / b_norm
    if info != 0 or residual > 10.0 * rtol:
        raise SolverError(f"CG did not converge after {len(history)} iterations", residual, history)
    logger.debug("CG converged in %d iterations (residual %.2e)", len(history), residual)
    return x


class SpdSolver:
    """Solves one fixed SPD system repeatedly, by CG or by a cached LU factorisation."""

    def __init__(self, matrix: sparse.spmatrix, method: str = "cg", rtol: float = 1e-10, maxiter: Optional[int] = None):
        if method not in SOLVERS:
            raise InvalidArgumentError(f"solver must be one of {SOLVERS}, got {method!r}")
        self.matrix = sparse.csr_matrix(matrix)
        self.method = method
        self.rtol = rtol
        self.maxiter = maxiter
        self._factor: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def _factorised(self) -> Callable[[np.ndarray], np.ndarray]:
        if self._factor is None:
            try:
                self._factor = splu(self.matrix.tocsc()).solve
            except RuntimeError as exc:
                raise SolverError(f"factorisation failed: {exc}") from exc
        return self._factor

    def solve(self, rhs: np.ndarray, x0: Optional[np.ndarray] = None) -> np.ndarray:
        if self.method == "direct":
            return self._factorised()(np.asarray(rhs, dtype=float))
        return jacobi_cg(self.matrix, rhs, rtol=self.rtol, maxiter=self.maxiter, x0=x0)
