"""Census of a cut mesh: record counts, per-worker statistics and volume partition residuals."""

from typing import Dict, List

from pydantic import BaseModel, Field

from ..models.cutmesh import CutMesh


class IntersectionReport(BaseModel):
    acoustic_cells: int
    fluid_cells: int
    candidates: int = Field(description="pairs left by the broad phase")
    records: int
    contained: int
    clipped: int
    rejected_by_sat: int
    empty_clips: int
    max_acoustic_residual: float
    max_fluid_residual: float
    workers: List[Dict[str, float]] = Field(default_factory=list)

    def counts(self) -> Dict[str, int]:
        """The reproducible part of the report."""
        return self.model_dump(exclude={"workers", "max_acoustic_residual", "max_fluid_residual"})


def intersection_report(cut: CutMesh) -> IntersectionReport:
    stats = cut.worker_stats
    acoustic = cut.acoustic_residuals()
    fluid = cut.fluid_residuals()
    return IntersectionReport(
        acoustic_cells=cut.acoustic.n_cells,
        fluid_cells=cut.fluid.n_cells,
        candidates=sum(s.candidates for s in stats),
        records=len(cut),
        contained=cut.n_contained,
        clipped=cut.n_clipped,
        rejected_by_sat=sum(s.rejected_by_sat for s in stats),
        empty_clips=sum(s.empty_clips for s in stats),
        max_acoustic_residual=float(acoustic.max()) if len(acoustic) else 0.0,
        max_fluid_residual=float(fluid.max()) if len(fluid) else 0.0,
        workers=[
            {
                "worker": s.worker,
                "first_cell": s.first_cell,
                "last_cell": s.last_cell,
                "candidates": s.candidates,
                "records": s.records,
                "seconds": s.seconds,
            }
            for s in stats
        ],
    )
