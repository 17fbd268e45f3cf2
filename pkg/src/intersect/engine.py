"""
Cut mesh of an acoustic and a fluid mesh.

Per acoustic cell: bounding-box candidates, then the containment shortcut
(every corner of a candidate's box maps into the reference cube), then the
separating-axis filter and convex clipping for the rest.
"""

import logging
import time
from dataclasses import replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..mesh.cells import cell_polytope, hex_element
from ..models.cutmesh import CutMesh, WorkerStats
from ..models.errors import GeometryError
from ..models.mesh import Aabb, CellKind, PolyMesh
from ..utils.parallel import contiguous_blocks, map_blocks, resolve_workers
from .broad_phase import broad_phase
from .clipping import clip_convex
from .sat import sat_intersects
from .trilinear import inverse_trilinear_many, points_in_reference

logger = logging.getLogger(__name__)

_WORKER: Dict[str, object] = {}


def _init_worker(acoustic: PolyMesh, fluid: PolyMesh, candidates: List[np.ndarray], keep: bool) -> None:
    _WORKER.update(acoustic=acoustic, fluid=fluid, candidates=candidates, keep=keep)


def _contained(acoustic: PolyMesh, fluid: PolyMesh, a: int, cand: np.ndarray) -> np.ndarray:
    if acoustic.kind is not CellKind.HEXAHEDRAL or not len(cand):
        return np.zeros(len(cand), dtype=bool)
    element = hex_element(acoustic, a)
    if not element.is_affine and not cell_polytope(acoustic, a).is_convex():
        return np.zeros(len(cand), dtype=bool)
    geo = fluid.geometry
    corners = np.concatenate(
        [Aabb(geo.cell_min[f], geo.cell_max[f]).corners() for f in cand]
    )
    xi, ok = inverse_trilinear_many(element, corners)
    inside = points_in_reference(xi, ok).reshape(len(cand), 8)
    return inside.all(axis=1)


def _process_block(block: Tuple[int, int]) -> Tuple[list, WorkerStats]:
    acoustic: PolyMesh = _WORKER["acoustic"]
    fluid: PolyMesh = _WORKER["fluid"]
    candidates: List[np.ndarray] = _WORKER["candidates"]
    keep: bool = _WORKER["keep"]
    f_volume = fluid.geometry.cell_volume
    a_volume = acoustic.geometry.cell_volume

    started = time.perf_counter()
    rows = []
    n_cand = n_contained = n_clipped = n_sat = n_empty = 0
    for a in range(*block):
        cand = candidates[a]
        n_cand += len(cand)
        contained = _contained(acoustic, fluid, a, cand)
        p_a = None
        for f, inside in zip(cand.tolist(), contained.tolist()):
            # contained candidates are recorded and the loop moves on to the next one
            if inside:
                rows.append((a, f, float(f_volume[f]), 0, None))
                n_contained += 1
                continue
            if p_a is None:
                p_a = cell_polytope(acoustic, a)
            p_f = cell_polytope(fluid, f)
            if not sat_intersects(p_f, p_a):
                n_sat += 1
                continue
            try:
                cut = clip_convex(p_f, p_a, eps_vol=1e-14 * min(f_volume[f], a_volume[a]))
            except (ValueError, FloatingPointError) as exc:
                raise GeometryError(f"clipping failed: {exc}", pair=(a, f)) from exc
            if cut is None:
                n_empty += 1
                continue
            rows.append((a, f, cut.volume, 1, cut if keep else None))
            n_clipped += 1
    stats = WorkerStats(
        worker=-1,
        first_cell=block[0],
        last_cell=block[1] - 1,
        candidates=n_cand,
        contained=n_contained,
        clipped=n_clipped,
        rejected_by_sat=n_sat,
        empty_clips=n_empty,
        seconds=time.perf_counter() - started,
    )
    return rows, stats


def compute_intersection(
    acoustic: PolyMesh,
    fluid: PolyMesh,
    workers: Optional[int] = 1,
    brute_force: bool = False,
    keep_polytopes: bool = True,
) -> CutMesh:
    """
    Intersect every acoustic cell with every overlapping fluid cell.

    Acoustic cells are split into one contiguous block per worker; records
    come back in (acoustic, fluid) order regardless of the worker count.
    """
    n_workers = resolve_workers(workers)
    t0 = time.perf_counter()
    candidates = broad_phase(acoustic, fluid, brute_force=brute_force)
    logger.info(
        "broad phase: %d candidate pairs for %d x %d cells (%.2fs)",
        sum(len(c) for c in candidates),
        acoustic.n_cells,
        fluid.n_cells,
        time.perf_counter() - t0,
    )
    # build the cached geometry before forking so workers inherit it
    _ = (fluid.geometry, acoustic.geometry, acoustic.kind)

    blocks = contiguous_blocks(acoustic.n_cells, n_workers)
    results = map_blocks(
        _process_block,
        blocks,
        n_workers,
        initializer=_init_worker,
        initargs=(acoustic, fluid, candidates, keep_polytopes),
    )

    rows = [row for block_rows, _ in results for row in block_rows]
    stats = tuple(replace(s, worker=i) for i, (_, s) in enumerate(results))
    rows.sort(key=lambda r: (r[0], r[1]))
    cut = CutMesh(
        acoustic=acoustic,
        fluid=fluid,
        acoustic_cell=np.array([r[0] for r in rows], dtype=np.int64),
        fluid_cell=np.array([r[1] for r in rows], dtype=np.int64),
        volume=np.array([r[2] for r in rows], dtype=float),
        provenance=np.array([r[3] for r in rows], dtype=np.int8),
        cuts=tuple(r[4] for r in rows) if keep_polytopes else None,
        worker_stats=stats,
    )
    logger.info(
        "intersection: %d records (%d contained, %d clipped) with %d workers in %.2fs",
        len(cut),
        cut.n_contained,
        cut.n_clipped,
        n_workers,
        time.perf_counter() - t0,
    )
    return cut
