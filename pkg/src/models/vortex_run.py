from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated

from .config import VortexRunConfig


def keep_latest(existing: Any, new: Any) -> Any:
    """Reducer keeping the latest non-None value."""
    if new is not None:
        return new
    return existing


def keep_first_error(existing: Optional[str], new: Optional[str]) -> Optional[str]:
    """Reducer keeping the first error encountered."""
    if existing is not None:
        return existing
    return new


def add_to_list(existing: Optional[List], new: Optional[List]) -> List:
    return (existing or []) + (new or [])


class VortexReport(BaseModel):
    """Comparison of the computed acoustic field with the analytic far field."""

    rms_deviation: float = Field(description="RMS of normalised numerical minus analytic pressure on the probe line")
    symmetry_deviation: float = Field(description="relative RMS of p(r, theta) - p(r, theta + pi) on the ring")
    period: float = Field(description="period from zero crossings at the probe point [s]")
    period_error: float = Field(description="|period - T_a| / T_a")
    acoustic_period: float
    p_ref_numerical: float
    p_ref_analytic: float
    max_abs_rho: float
    steps: int
    acoustic_elements: int
    acoustic_nodes: int
    fluid_cells: int
    checks: Dict[str, bool] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


class VortexRunState(BaseModel):
    """State passed between the vortex-pair workflow nodes."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: VortexRunConfig
    workers: Optional[int] = 1
    output_dir: Optional[str] = None
    acoustic_mesh: Annotated[Any, keep_latest] = None
    fluid_mesh: Annotated[Any, keep_latest] = None
    cut: Annotated[Any, keep_latest] = None
    space: Annotated[Any, keep_latest] = None
    coupling: Annotated[Any, keep_latest] = None
    operators: Annotated[Any, keep_latest] = None
    history: Annotated[Optional[Dict[str, Any]], keep_latest] = None
    report: Annotated[Optional[VortexReport], keep_latest] = None
    timings: Annotated[List[Dict[str, float]], add_to_list] = Field(default_factory=list)
    error: Annotated[Optional[str], keep_first_error] = None
    exception: Annotated[Optional[Any], keep_first_error] = None
