"""Run configuration: one validated section per command plus shared run settings."""

from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..projection.fields import SeparableTrigField
from .mesh import ProjectionMethod
from .vortex import VortexPairConfig


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MeshKind(str, Enum):
    CARTESIAN = "cartesian"
    DISTORTED = "distorted"
    O_GRID = "o_grid"
    DISK = "disk"
    FILE = "file"


class MeshSpec(StrictModel):
    """A generated mesh or a mesh file."""

    kind: MeshKind = MeshKind.CARTESIAN
    lower: Tuple[float, float, float] = (-0.5, -0.5, -0.5)
    upper: Tuple[float, float, float] = (0.5, 0.5, 0.5)
    cells: Tuple[int, int, int] = (4, 4, 4)
    amplitude: float = Field(default=0.0, ge=0.0, lt=0.3, description="distortion as a fraction of h")
    seed: Optional[int] = Field(default=None, description="distortion seed; the run seed when unset")
    radius: Optional[float] = Field(default=None, gt=0, description="disk radius for kind=disk")
    half_width: float = Field(default=16.0, gt=0)
    block_cells: int = Field(default=32, ge=1)
    outer_radius: float = Field(default=50.0, gt=0)
    rings: int = Field(default=24, ge=1)
    thickness: float = Field(default=1.0, gt=0)
    path: Optional[str] = None
    name: Optional[str] = None

    @field_validator("cells")
    @classmethod
    def _positive_cells(cls, value):
        if min(value) < 1:
            raise ValueError("every axis needs at least one cell")
        return value

    @model_validator(mode="after")
    def _required_fields(self):
        if self.kind is MeshKind.FILE and not self.path:
            raise ValueError("a file mesh needs a path")
        if self.kind is MeshKind.DISK and self.radius is None:
            raise ValueError("a disk mesh needs a radius")
        return self


class RunSettings(StrictModel):
    seed: int = 0
    workers: int = Field(default=1, ge=0, description="0 means one per CPU")
    output_dir: str = "outputs"
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"


class IntersectConfig(StrictModel):
    acoustic: MeshSpec = Field(default_factory=MeshSpec)
    fluid: MeshSpec = Field(default_factory=lambda: MeshSpec(cells=(8, 8, 8)))
    brute_force: bool = False
    dump_polytopes: bool = False
    keep_polytopes: bool = False


class IntegrateCheckConfig(StrictModel):
    acoustic: MeshSpec = Field(default_factory=MeshSpec)
    fluid: MeshSpec = Field(default_factory=lambda: MeshSpec(kind=MeshKind.DISTORTED, cells=(10, 10, 10), amplitude=0.2))
    monomials: List[Tuple[int, int, int]] = Field(default_factory=lambda: [(0, 0, 0), (2, 2, 2), (4, 4, 4)])
    tessellation_check: bool = True


class ProjectSweepConfig(StrictModel):
    lower: Tuple[float, float, float] = (-0.5, -0.5, -0.5)
    upper: Tuple[float, float, float] = (0.5, 0.5, 0.5)
    acoustic_cells: List[int] = Field(default_factory=lambda: [4, 8], description="acoustic cells per axis")
    refinements: List[int] = Field(default_factory=lambda: [2, 4, 8, 16], description="fluid cells per acoustic cell and axis")
    degrees: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    methods: List[ProjectionMethod] = Field(
        default_factory=lambda: [ProjectionMethod.QUADRATURE_FREE, ProjectionMethod.MIDPOINT]
    )
    fluid_distortion: float = Field(default=0.0, ge=0.0, lt=0.3, description="non-zero gives non-nested grids")
    field: SeparableTrigField = Field(default_factory=SeparableTrigField)

    @field_validator("acoustic_cells", "refinements", "degrees")
    @classmethod
    def _non_empty(cls, value):
        if not value or min(value) < 1:
            raise ValueError("need at least one positive entry")
        return value


class ProbeConfig(StrictModel):
    x_min: float = 20.0
    x_max: float = 40.0
    samples: int = Field(default=81, ge=2)
    ring_radius: float = 30.0
    ring_samples: int = Field(default=72, ge=8)


class VortexRunConfig(StrictModel):
    vortex: VortexPairConfig = Field(default_factory=VortexPairConfig)
    acoustic: MeshSpec = Field(default_factory=lambda: MeshSpec(kind=MeshKind.O_GRID))
    fluid_radius: float = Field(default=15.0, gt=0)
    fluid_h: float = Field(default=0.2, gt=0)
    degree: int = Field(default=2, ge=1, le=8)
    dt: float = Field(default=0.02, gt=0)
    t_final: float = Field(default=160.0, gt=0)
    ramp_end: float = Field(default=40.0, gt=0)
    solver: Literal["cg", "direct"] = "direct"
    snapshot_dt: float = Field(default=0.02, gt=0)
    interpolation: Literal["nearest", "linear"] = "nearest"
    taper_inner: float = Field(default=10.0, gt=0)
    taper_outer: float = Field(default=15.0, gt=0)
    absorbing_fraction: float = Field(default=0.9, gt=0, le=1.0, description="outer faces beyond this share of R absorb")
    phase: Literal["corrected", "printed"] = "corrected"
    probe: ProbeConfig = Field(default_factory=ProbeConfig)
    log_every: int = Field(default=500, ge=1)
    field_every: Optional[int] = Field(default=None, ge=1, description="write the nodal field every n steps")

    @model_validator(mode="after")
    def _taper_order(self):
        if self.taper_inner >= self.taper_outer:
            raise ValueError("taper_inner must be below taper_outer")
        return self


class MeshGenConfig(StrictModel):
    mesh: MeshSpec = Field(default_factory=MeshSpec)
    output: str = "mesh.txt"


class RunConfig(StrictModel):
    run: RunSettings = Field(default_factory=RunSettings)
    intersect: IntersectConfig = Field(default_factory=IntersectConfig)
    integrate_check: IntegrateCheckConfig = Field(default_factory=IntegrateCheckConfig)
    project_sweep: ProjectSweepConfig = Field(default_factory=ProjectSweepConfig)
    vortex_pair: VortexRunConfig = Field(default_factory=VortexRunConfig)
    mesh_gen: MeshGenConfig = Field(default_factory=MeshGenConfig)
