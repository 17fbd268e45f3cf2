from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .mesh import PolyMesh, Provenance
from .polytope import Polytope

PROVENANCE_CODES = (Provenance.CONTAINED, Provenance.CLIPPED)


@dataclass(frozen=True)
class IntersectionRecord:
    acoustic_cell: int
    fluid_cell: int
    volume: float
    provenance: Provenance
    cut: Optional[Polytope] = None


@dataclass(frozen=True, eq=False)
class WorkerStats:
    worker: int
    first_cell: int
    last_cell: int
    candidates: int
    contained: int
    clipped: int
    rejected_by_sat: int
    empty_clips: int
    seconds: float = field(default=0.0, compare=False)

    @property
    def records(self) -> int:
        return self.contained + self.clipped


@dataclass(frozen=True, eq=False)
class CutMesh:
    """
    Intersection records sorted by (acoustic cell, fluid cell).

    Clipped polytopes are kept only when requested; contained records and
    dropped polytopes are rebuilt on demand from the two meshes.
    """

    acoustic: PolyMesh
    fluid: PolyMesh
    acoustic_cell: np.ndarray
    fluid_cell: np.ndarray
    volume: np.ndarray
    provenance: np.ndarray  # 0 contained, 1 clipped
    cuts: Optional[Tuple[Optional[Polytope], ...]] = None
    worker_stats: Tuple[WorkerStats, ...] = ()

    def __len__(self) -> int:
        return len(self.acoustic_cell)

    @cached_property
    def per_acoustic_index(self) -> np.ndarray:
        """Offsets so that records of acoustic cell a are [ptr[a], ptr[a+1])."""
        return np.searchsorted(self.acoustic_cell, np.arange(self.acoustic.n_cells + 1))

    def records_of(self, acoustic_cell: int) -> range:
        ptr = self.per_acoustic_index
        return range(int(ptr[acoustic_cell]), int(ptr[acoustic_cell + 1]))

    @property
    def n_contained(self) -> int:
        return int(np.count_nonzero(self.provenance == 0))

    @property
    def n_clipped(self) -> int:
        return int(np.count_nonzero(self.provenance == 1))

    def polytope(self, i: int) -> Polytope:
        from ..intersect.clipping import clip_convex
        from ..mesh.cells import cell_polytope

        if self.cuts is not None and self.cuts[i] is not None:
            return self.cuts[i]
        fluid_poly = cell_polytope(self.fluid, int(self.fluid_cell[i]))
        if self.provenance[i] == 0:
            return fluid_poly
        cut = clip_convex(fluid_poly, cell_polytope(self.acoustic, int(self.acoustic_cell[i])), eps_vol=0.0)
        return cut if cut is not None else fluid_poly

    def record(self, i: int) -> IntersectionRecord:
        return IntersectionRecord(
            acoustic_cell=int(self.acoustic_cell[i]),
            fluid_cell=int(self.fluid_cell[i]),
            volume=float(self.volume[i]),
            provenance=PROVENANCE_CODES[int(self.provenance[i])],
            cut=self.polytope(i),
        )

    def __iter__(self) -> Iterator[IntersectionRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def acoustic_residuals(self) -> np.ndarray:
        """|sum of record volumes - |K_a|| / |K_a| per acoustic cell."""
        vol = self.acoustic.geometry.cell_volume
        got = np.bincount(self.acoustic_cell, weights=self.volume, minlength=self.acoustic.n_cells)
        return np.abs(got - vol) / vol

    def fluid_residuals(self) -> np.ndarray:
        vol = self.fluid.geometry.cell_volume
        got = np.bincount(self.fluid_cell, weights=self.volume, minlength=self.fluid.n_cells)
        return np.abs(got - vol) / vol

    def rows(self) -> List[Tuple[int, int, float, str]]:
        return [
            (int(a), int(f), float(v), PROVENANCE_CODES[int(p)].value)
            for a, f, v, p in zip(self.acoustic_cell, self.fluid_cell, self.volume, self.provenance)
        ]
