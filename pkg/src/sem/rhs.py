import weakref
from typing import List, Sequence

import numpy as np
from scipy import sparse

from ..models.errors import InvalidArgumentError
from .operators import divergence_operators
from .space import SemSpace

_DIVERGENCE: "weakref.WeakKeyDictionary[SemSpace, List[sparse.csr_matrix]]" = weakref.WeakKeyDictionary()


def cached_divergence_operators(space: SemSpace) -> List[sparse.csr_matrix]:
    ops = _DIVERGENCE.get(space)
    if ops is None:
        ops = divergence_operators(space)
        _DIVERGENCE[space] = ops
    return ops


def assemble_wave_rhs(space: SemSpace, source: Sequence[np.ndarray]) -> np.ndarray:
    """
    Weak right-hand side F_i = -sum_K (q, grad phi_i)^NI_K of a nodal vector field q.

    The divergence stays on the test function, so q only has to be continuous
    nodal data on the acoustic space.
    """
    q = np.asarray(source, dtype=float)
    if q.ndim != 2 or q.shape[0] != 3 or q.shape[1] != space.n_nodes:
        raise InvalidArgumentError(f"source must have shape (3, {space.n_nodes}), got {q.shape}")
    g = cached_divergence_operators(space)
    return -(g[0] @ q[0] + g[1] @ q[1] + g[2] @ q[2])
