import logging
from typing import Optional, Union

import numpy as np

from ..models.cutmesh import CutMesh
from ..models.errors import InvalidArgumentError
from ..models.mesh import CellField, PolyMesh, ProjectionMethod
from ..sem.space import SemSpace
from ..utils.solvers import SpdSolver
from .coupling import CouplingSystem, assemble_coupling

logger = logging.getLogger(__name__)

PROJECTION_RTOL = 1e-12

FluidValues = Union[CellField, np.ndarray]


def fluid_values(q_f: FluidValues, mesh: PolyMesh) -> np.ndarray:
    """Raw per-cell values, checked against the fluid mesh."""
    if isinstance(q_f, CellField):
        return q_f.check(mesh)
    values = np.asarray(q_f, dtype=float)
    if values.shape[0] != mesh.n_cells:
        raise InvalidArgumentError(f"field has {values.shape[0]} rows but mesh has {mesh.n_cells} cells")
    return values


class Projector:
    """
    Solves M_aa q_a = M_af q_f for many right-hand sides.

    With solver="direct" the mass matrix is factorised once; with "cg" each
    solve warm-starts from the previous result.
    """

    def __init__(self, system: CouplingSystem, solver: str = "cg", rtol: float = PROJECTION_RTOL):
        self.system = system
        self._solver = SpdSolver(system.mass, method=solver, rtol=rtol, maxiter=10 * system.n_acoustic)
        self._last: Optional[np.ndarray] = None

    def project(self, q_f: FluidValues) -> np.ndarray:
        values = fluid_values(q_f, self.system.cut.fluid)
        if values.ndim != 1:
            raise InvalidArgumentError("project expects a scalar cell field; use project_vector")
        q_a = self._solver.solve(self.system.coupling @ values, x0=self._last)
        self._last = q_a
        return q_a

    def project_vector(self, q_f: FluidValues) -> np.ndarray:
        """Componentwise projection of an (N_f, 3) field; returns (3, N_a)."""
        values = fluid_values(q_f, self.system.cut.fluid)
        if values.ndim != 2:
            raise InvalidArgumentError("project_vector expects one row of components per cell")
        return np.stack([self.project(values[:, d]) for d in range(values.shape[1])])


def project(system: CouplingSystem, q_f: FluidValues) -> np.ndarray:
    return Projector(system).project(q_f)


def project_vector(system: CouplingSystem, q_f: FluidValues) -> np.ndarray:
    return Projector(system).project_vector(q_f)


def project_midpoint(cut: CutMesh, space: SemSpace, q_f: FluidValues, workers: Optional[int] = 1) -> np.ndarray:
    """Projection with M_af evaluated by the mid-point rule on each cut cell."""
    system = assemble_coupling(space, cut, method=ProjectionMethod.MIDPOINT, workers=workers)
    return project(system, q_f)
