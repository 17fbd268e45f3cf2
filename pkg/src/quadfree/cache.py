from typing import Dict, Sequence, Tuple

import numpy as np

from ..models.polytope import Monomial, Polytope
from .integrator import HomogeneousIntegrator


class MonomialCache:
    """
    Memoises monomial integrals by (geometry hash, exponents).

    Coordinates are quantised at 1e-15 before hashing, so repeated cut cells
    mapped into a reference frame (nested grids) share their entries.
    """

    def __init__(self, quantum: float = 1e-15):
        self.quantum = quantum
        self._values: Dict[Tuple[str, Monomial], float] = {}
        self._tensors: Dict[Tuple[str, int], np.ndarray] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._values)

    def key(self, polytope: Polytope) -> str:
        return polytope.cache_key(self.quantum)

    def integrate(self, polytope: Polytope, monomial: Sequence[int]) -> float:
        m = Monomial.parse(monomial)
        key = (self.key(polytope), m)
        if key in self._values:
            self.hits += 1
            return self._values[key]
        self.misses += 1
        value = HomogeneousIntegrator(polytope).integrate(m)
        self._values[key] = value
        return value

    def moment_tensor(self, polytope: Polytope, order: int) -> np.ndarray:
        geo_key = self.key(polytope)
        cached = self._tensors.get((geo_key, order))
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        tensor = HomogeneousIntegrator(polytope).moment_tensor(order)
        tensor.setflags(write=False)
        self._tensors[(geo_key, order)] = tensor
        for idx in np.ndindex(tensor.shape):
            self._values[(geo_key, Monomial(*idx))] = float(tensor[idx])
        return tensor

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0

    def clear(self) -> None:
        self._values.clear()
        self._tensors.clear()
        self.hits = self.misses = 0
