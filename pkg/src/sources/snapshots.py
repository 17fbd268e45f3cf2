"""Periodic series of analytic fluid snapshots on the fluid mesh."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from ..models.errors import InvalidArgumentError
from ..models.mesh import CellField, PolyMesh
from ..models.vortex import VortexPairConfig
from .lighthill import LighthillOperator
from .smoothing import radial_taper
from .vortex import vortex_velocity

logger = logging.getLogger(__name__)

INTERPOLATION = ("nearest", "linear")


@dataclass(frozen=True, eq=False)
class FluidSnapshot:
    time: float
    velocity: CellField


class SnapshotSeries:
    """
    Snapshots every dt_f up to one acoustic period, replayed periodically.

    The source at an arbitrary time is the Lighthill divergence of the
    nearest snapshot, or a linear blend of the two neighbouring ones.
    """

    def __init__(
        self,
        cfg: VortexPairConfig,
        mesh: PolyMesh,
        dt_f: float = 0.02,
        cache: bool = False,
        taper: Optional[tuple] = None,
    ):
        if dt_f <= 0.0:
            raise InvalidArgumentError(f"snapshot interval must be positive, got {dt_f}")
        self.cfg = cfg
        self.mesh = mesh
        self.dt_f = dt_f
        period = cfg.acoustic_period
        self.count = max(1, int(round(period / dt_f))) if math.isfinite(period) else 1
        self.operator = LighthillOperator(mesh)
        self._centroids = mesh.geometry.cell_centroid
        self._taper = np.ones(mesh.n_cells) if taper is None else radial_taper(self._centroids, *taper)
        self._cache: Optional[Dict[int, np.ndarray]] = {} if cache else None

    def time_of(self, index: int) -> float:
        return (index % self.count) * self.dt_f

    def snapshot(self, index: int) -> FluidSnapshot:
        t = self.time_of(index)
        uv = vortex_velocity(self.cfg, self._centroids, t)
        velocity = np.column_stack([uv, np.zeros(len(uv))])
        return FluidSnapshot(t, CellField.on(self.mesh, velocity))

    def divergence(self, index: int) -> np.ndarray:
        """Tapered rho0 div(u (x) u) of one stored snapshot, shape (C, 3)."""
        k = index % self.count
        if self._cache is not None and k in self._cache:
            return self._cache[k]
        snap = self.snapshot(k)
        div = self.operator.divergence(snap.velocity.values, self.cfg.rho0) * self._taper[:, None]
        if self._cache is not None:
            self._cache[k] = div
        return div

    def source(self, t: float, interpolation: str = "nearest") -> np.ndarray:
        if interpolation not in INTERPOLATION:
            raise InvalidArgumentError(f"interpolation must be one of {INTERPOLATION}, got {interpolation!r}")
        if t < 0.0:
            raise InvalidArgumentError(f"time must be non-negative, got {t}")
        pos = t / self.dt_f
        if interpolation == "nearest":
            return self.divergence(int(round(pos)))
        lo = int(math.floor(pos))
        frac = pos - lo
        if frac <= 1e-12:
            return self.divergence(lo)
        return (1.0 - frac) * self.divergence(lo) + frac * self.divergence(lo + 1)

    def write_snapshots(self, directory: Union[str, Path], count: Optional[int] = None) -> Path:
        """Text tables `cell_id ux uy uz` per snapshot plus a `times.csv` manifest."""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        n = self.count if count is None else min(count, self.count)
        manifest = []
        for k in range(n):
            snap = self.snapshot(k)
            name = f"snapshot_{k:05d}.txt"
            u = snap.velocity.values
            pd.DataFrame(
                {"cell_id": np.arange(len(u)), "ux": u[:, 0], "uy": u[:, 1], "uz": u[:, 2]}
            ).to_csv(out / name, sep=" ", index=False, float_format="%.17g")
            manifest.append({"index": k, "time": snap.time, "file": name})
        pd.DataFrame(manifest).to_csv(out / "times.csv", index=False, float_format="%.17g")
        logger.info("wrote %d snapshots to %s", n, out)
        return out
