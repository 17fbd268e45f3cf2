"""
Workflow for the corotating vortex-pair acoustic run.

build_meshes -> intersect -> couple -> assemble_wave -> march -> compare.
A node that fails records the first error and the graph ends there.
"""

import logging
import math
import time
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np
from langgraph.graph import END, StateGraph

from ..intersect.engine import compute_intersection
from ..mesh.factory import build_mesh
from ..mesh.generators import generate_cartesian, restrict_to_disk
from ..models.config import MeshKind, VortexRunConfig
from ..models.errors import InvalidArgumentError
from ..models.mesh import Aabb, ProjectionMethod
from ..models.vortex_run import VortexReport, VortexRunState
from ..projection.coupling import assemble_coupling
from ..projection.solve import Projector
from ..sem.newmark import NewmarkIntegrator, WaveState, apply_source_ramp
from ..sem.operators import Material, assemble_operators
from ..sem.output import probe_points, write_field_table
from ..sem.rhs import assemble_wave_rhs
from ..sem.space import build_space
from ..sources.snapshots import SnapshotSeries
from ..sources.vortex import farfield_at_points

logger = logging.getLogger(__name__)

RMS_TOLERANCE = 0.10
SYMMETRY_TOLERANCE = 0.03
PERIOD_TOLERANCE = 0.02

NODE_ORDER = ["build_meshes", "intersect", "couple", "assemble_wave", "march", "compare"]


def _guarded(name: str, body: Callable[[VortexRunState], Dict[str, Any]]) -> Callable[[VortexRunState], Dict[str, Any]]:
    """Run a node body, turning any exception into an error entry of the state."""

    def node(state: VortexRunState) -> Dict[str, Any]:
        started = time.perf_counter()
        try:
            update = body(state)
        except Exception as exc:
            logger.error("vortex-pair step %s failed: %s", name, exc)
            return {"error": f"{name}: {exc}", "exception": exc}
        update["timings"] = [{name: time.perf_counter() - started}]
        return update

    node.__name__ = f"{name}_node"
    return node


def absorbing_outer_ring(outer_radius: float, fraction: float):
    """Predicate for lateral boundary faces lying on the outer circle."""

    def predicate(centroid: np.ndarray, normal: np.ndarray) -> bool:
        return abs(normal[2]) < 0.5 and math.hypot(centroid[0], centroid[1]) > fraction * outer_radius

    return predicate


def fluid_disk(cfg: VortexRunConfig):
    """Staircase disk of square cells, one layer as thick as the acoustic mesh."""
    n = int(math.ceil(2.0 * cfg.fluid_radius / cfg.fluid_h))
    half = 0.5 * n * cfg.fluid_h
    thickness = cfg.acoustic.thickness
    box = Aabb((-half, -half, -0.5 * thickness), (half, half, 0.5 * thickness))
    return restrict_to_disk(generate_cartesian(box, (n, n, 1), name="fluid"), cfg.fluid_radius)


def build_meshes_node(state: VortexRunState) -> Dict[str, Any]:
    cfg = state.config
    if cfg.acoustic.kind is not MeshKind.O_GRID:
        raise InvalidArgumentError("the vortex-pair run needs an o_grid acoustic mesh")
    if cfg.probe.ring_samples % 2:
        raise InvalidArgumentError("ring_samples must be even to pair opposite angles")
    acoustic = build_mesh(cfg.acoustic)
    fluid = fluid_disk(cfg)
    logger.info("vortex pair: %d acoustic elements, %d fluid cells", acoustic.n_cells, fluid.n_cells)
    return {"acoustic_mesh": acoustic, "fluid_mesh": fluid}


def intersect_node(state: VortexRunState) -> Dict[str, Any]:
    cut = compute_intersection(state.acoustic_mesh, state.fluid_mesh, workers=state.workers, keep_polytopes=False)
    return {"cut": cut}


def couple_node(state: VortexRunState) -> Dict[str, Any]:
    cfg = state.config
    predicate = absorbing_outer_ring(cfg.acoustic.outer_radius, cfg.absorbing_fraction)
    space = build_space(state.acoustic_mesh, cfg.degree, absorbing=predicate)
    system = assemble_coupling(space, state.cut, method=ProjectionMethod.QUADRATURE_FREE, workers=state.workers)
    return {"space": space, "coupling": system}


def assemble_wave_node(state: VortexRunState) -> Dict[str, Any]:
    cfg = state.config
    material = Material(c0=cfg.vortex.c0, rho0=cfg.vortex.rho0)
    return {"operators": assemble_operators(state.space, material)}


def _ring_points(cfg: VortexRunConfig) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(cfg.probe.ring_samples) / cfg.probe.ring_samples
    r = cfg.probe.ring_radius
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), np.zeros_like(theta)])


def march_node(state: VortexRunState) -> Dict[str, Any]:
    """
    Newmark time loop with the projected, tapered Lighthill source.

    The last acoustic period is sampled on the ring and at the mid-probe
    point; the probe line is kept at the final time.
    """
    cfg = state.config
    space = state.space
    series = SnapshotSeries(cfg.vortex, state.fluid_mesh, cfg.snapshot_dt, taper=(cfg.taper_inner, cfg.taper_outer))
    projector = Projector(state.coupling, solver=cfg.solver)
    integrator = NewmarkIntegrator(state.operators, cfg.dt, solver=cfg.solver)

    probe = cfg.probe
    line = probe_points((probe.x_min, 0.0, 0.0), (1.0, 0.0, 0.0), probe.x_max - probe.x_min, probe.samples)
    point = np.array([[0.5 * (probe.x_min + probe.x_max), 0.0, 0.0]])
    sample_ring = space.interpolation_matrix(_ring_points(cfg))
    sample_point = space.interpolation_matrix(point)

    def load(t: float) -> np.ndarray:
        ramp = apply_source_ramp(t, cfg.ramp_end)
        if ramp == 0.0:
            return np.zeros(space.n_nodes)
        q_a = projector.project_vector(series.source(t, cfg.interpolation))
        return ramp * assemble_wave_rhs(space, q_a)

    n_steps = int(round(cfg.t_final / cfg.dt))
    period = cfg.vortex.acoustic_period
    window = n_steps if not math.isfinite(period) else min(n_steps, int(math.ceil(period / cfg.dt)))
    times, ring, trace = [], [], []
    state_w = WaveState.zeros(space.n_nodes)
    rhs = load(0.0)
    out = Path(state.output_dir) if state.output_dir else None
    for n in range(n_steps):
        rhs_next = load((n + 1) * cfg.dt)
        state_w = integrator.step(state_w, rhs, rhs_next)
        rhs = rhs_next
        if not np.all(np.isfinite(state_w.rho)):
            raise InvalidArgumentError(f"the acoustic field is no longer finite at step {state_w.step}")
        if n >= n_steps - window:
            times.append(state_w.t)
            ring.append(sample_ring @ state_w.rho)
        trace.append(float((sample_point @ state_w.rho)[0]))
        if state_w.step % cfg.log_every == 0:
            logger.info("step %d / %d, t = %.3f, max |rho| = %.3e", state_w.step, n_steps, state_w.t, np.abs(state_w.rho).max())
        if out is not None and cfg.field_every and state_w.step % cfg.field_every == 0:
            write_field_table(out / "fields" / f"rho_{state_w.step:06d}.txt", space, state_w.rho)

    history = {
        "times": np.asarray(times),
        "ring": np.asarray(ring),
        "trace_times": cfg.dt * np.arange(1, n_steps + 1),
        "trace": np.asarray(trace),
        "line": line,
        "line_rho": space.evaluate(state_w.rho, line),
        "final_time": state_w.t,
        "steps": state_w.step,
        "max_abs_rho": float(np.abs(state_w.rho).max()) if space.n_nodes else 0.0,
    }
    return {"history": history}


def normalised(values: np.ndarray) -> np.ndarray:
    """values / max|values|; all zeros stay zero."""
    peak = np.nanmax(np.abs(values)) if len(values) else 0.0
    return values / peak if peak > 0.0 else np.zeros_like(values)


def zero_crossing_period(times: np.ndarray, signal: np.ndarray) -> float:
    """Twice the mean spacing of linearly interpolated sign changes; NaN with fewer than three."""
    s = np.asarray(signal, dtype=float)
    idx = np.flatnonzero(np.signbit(s[:-1]) != np.signbit(s[1:]))
    idx = idx[(s[idx] != s[idx + 1])]
    if len(idx) < 3:
        return float("nan")
    t0, t1 = times[idx], times[idx + 1]
    crossings = t0 - s[idx] * (t1 - t0) / (s[idx + 1] - s[idx])
    return float(2.0 * np.mean(np.diff(crossings)))


def symmetry_deviation(ring: np.ndarray) -> float:
    """Relative RMS of the difference between opposite ring samples."""
    if ring.size == 0:
        return float("nan")
    half = ring.shape[1] // 2
    scale = math.sqrt(float(np.mean(ring**2)))
    if scale == 0.0:
        return 0.0
    return math.sqrt(float(np.mean((ring[:, :half] - ring[:, half:]) ** 2))) / scale


def compare_node(state: VortexRunState) -> Dict[str, Any]:
    cfg = state.config
    h = state.history
    c0sq = cfg.vortex.c0**2
    p_num = c0sq * h["line_rho"]
    p_ana = farfield_at_points(cfg.vortex, h["line"], h["final_time"], cfg.phase)
    rms = math.sqrt(float(np.nanmean((normalised(p_num) - normalised(p_ana)) ** 2)))

    # the trace after the ramp has settled
    settled = h["trace_times"] >= cfg.ramp_end
    period = zero_crossing_period(h["trace_times"][settled], h["trace"][settled])
    t_a = cfg.vortex.acoustic_period
    period_error = abs(period - t_a) / t_a if math.isfinite(t_a) and math.isfinite(period) else float("nan")
    symmetry = symmetry_deviation(h["ring"])

    report = VortexReport(
        rms_deviation=rms,
        symmetry_deviation=symmetry,
        period=period,
        period_error=period_error,
        acoustic_period=t_a,
        p_ref_numerical=float(np.nanmax(np.abs(p_num))) if len(p_num) else 0.0,
        p_ref_analytic=float(np.nanmax(np.abs(p_ana))) if len(p_ana) else 0.0,
        max_abs_rho=h["max_abs_rho"],
        steps=h["steps"],
        acoustic_elements=state.acoustic_mesh.n_cells,
        acoustic_nodes=state.space.n_nodes,
        fluid_cells=state.fluid_mesh.n_cells,
        checks={
            "waveform": rms <= RMS_TOLERANCE,
            "symmetry": symmetry <= SYMMETRY_TOLERANCE,
            "period": bool(period_error <= PERIOD_TOLERANCE),
        },
    )
    logger.info(
        "vortex pair: waveform RMS %.3f, symmetry %.3f, period %.3f (T_a %.3f)",
        rms, symmetry, period, t_a,
    )
    return {"report": report}


NODES = {
    "build_meshes": build_meshes_node,
    "intersect": intersect_node,
    "couple": couple_node,
    "assemble_wave": assemble_wave_node,
    "march": march_node,
    "compare": compare_node,
}


def route_on_error(next_node: str) -> Callable[[VortexRunState], str]:
    def route(state: VortexRunState) -> str:
        return END if state.error else next_node

    return route


def create_vortex_pair_graph():
    """Linear workflow; every node jumps to END once an error is recorded."""
    workflow = StateGraph(VortexRunState)
    for name in NODE_ORDER:
        workflow.add_node(name, _guarded(name, NODES[name]))
    workflow.set_entry_point(NODE_ORDER[0])
    for current, following in zip(NODE_ORDER, NODE_ORDER[1:]):
        workflow.add_conditional_edges(current, route_on_error(following), {following: following, END: END})
    workflow.add_edge(NODE_ORDER[-1], END)
    return workflow.compile()


class VortexPairOrchestrator:
    """Runs the vortex-pair workflow and packages its outcome."""

    def __init__(self):
        self.graph = create_vortex_pair_graph()

    def run(self, config: VortexRunConfig, workers: Optional[int] = 1, output_dir: Optional[str] = None) -> Dict[str, Any]:
        """
        Returns a dictionary with `success`, `report`, `history`, `error`,
        `exception` and `partial_results`.
        """
        initial = VortexRunState(config=config, workers=workers, output_dir=output_dir)
        final = self.graph.invoke(initial)
        get = final.get if isinstance(final, dict) else lambda key, default=None: getattr(final, key, default)
        timings = {k: v for entry in get("timings", []) or [] for k, v in entry.items()}
        error = get("error")
        if error:
            return {
                "success": False,
                "error": error,
                "exception": get("exception"),
                "report": None,
                "history": get("history"),
                "timings": timings,
                "partial_results": self._extract_partial_results(get),
            }
        return {
            "success": True,
            "error": None,
            "exception": None,
            "report": get("report"),
            "history": get("history"),
            "timings": timings,
            "partial_results": self._extract_partial_results(get),
        }

    @staticmethod
    def _extract_partial_results(get) -> Dict[str, Any]:
        partial = {}
        if get("acoustic_mesh") is not None:
            partial["acoustic_elements"] = get("acoustic_mesh").n_cells
        if get("fluid_mesh") is not None:
            partial["fluid_cells"] = get("fluid_mesh").n_cells
        if get("cut") is not None:
            partial["cut_records"] = len(get("cut"))
        if get("space") is not None:
            partial["acoustic_nodes"] = get("space").n_nodes
        if get("history") is not None:
            partial["steps"] = get("history")["steps"]
        return partial


def run_vortex_pair(config: VortexRunConfig, workers: Optional[int] = 1, output_dir: Optional[str] = None) -> Dict[str, Any]:
    return VortexPairOrchestrator().run(config, workers, output_dir)
