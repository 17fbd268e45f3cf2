"""Analytic test fields and their cell averages on a fluid mesh."""

import math
from typing import Callable, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..mesh.cells import cell_polytope
from ..models.mesh import Aabb, CellField, PolyMesh
from ..quadfree.tessellation import integrate_tessellated

# quadrature degree for cell averages of general fields on general cells
AVERAGE_DEGREE = 12


class SeparableTrigField(BaseModel):
    """
    f(x, y, z) = amplitude * prod_d cos(pi k_d x_d + phase_d).

    Wavenumbers are given in multiples of pi; the default is
    cos(2 pi x) cos(2 pi y) cos(pi z).
    """

    model_config = ConfigDict(extra="forbid")

    wavenumbers: Sequence[float] = Field(default=(2.0, 2.0, 1.0), description="k_d in units of pi")
    phases: Sequence[float] = Field(default=(0.0, 0.0, 0.0))
    amplitude: float = 1.0

    @field_validator("wavenumbers", "phases")
    @classmethod
    def _three(cls, value):
        if len(value) != 3:
            raise ValueError("need one entry per axis")
        return tuple(float(v) for v in value)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        k = np.pi * np.asarray(self.wavenumbers)
        return self.amplitude * np.prod(np.cos(pts * k + np.asarray(self.phases)), axis=1)

    def box_average(self, box: Aabb) -> float:
        value = self.amplitude
        for lo, hi, k, phase in zip(box.min, box.max, self.wavenumbers, self.phases):
            k = math.pi * k
            if k == 0.0 or hi == lo:
                value *= math.cos(k * lo + phase)
            else:
                value *= (math.sin(k * hi + phase) - math.sin(k * lo + phase)) / (k * (hi - lo))
        return float(value)


ScalarField = Union[SeparableTrigField, Callable[[np.ndarray], np.ndarray]]


def cell_averages(field: ScalarField, mesh: PolyMesh) -> CellField:
    """
    Per-cell mean values of a field.

    Box cells of a separable trigonometric field use the closed form;
    everything else uses the tessellation rule.
    """
    geo = mesh.geometry
    values = np.empty(mesh.n_cells)
    boxes = geo.axis_aligned if isinstance(field, SeparableTrigField) else np.zeros(mesh.n_cells, dtype=bool)
    for c in range(mesh.n_cells):
        if boxes[c]:
            values[c] = field.box_average(Aabb(geo.cell_min[c], geo.cell_max[c]))
        else:
            values[c] = integrate_tessellated(cell_polytope(mesh, c), field, AVERAGE_DEGREE) / geo.cell_volume[c]
    return CellField.on(mesh, values)
