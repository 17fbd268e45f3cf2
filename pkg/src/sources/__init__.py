# Vortex-pair sources and Lighthill tensor post-processing
from .bessel import bessel_j2, bessel_y2
from .lighthill import LighthillOperator, lighthill_divergence
from .smoothing import radial_taper, smoothing_factor
from .snapshots import FluidSnapshot, SnapshotSeries
from .vortex import farfield_at_points, farfield_pressure, potential_velocity, vortex_centers, vortex_velocity

__all__ = [
    "bessel_j2",
    "bessel_y2",
    "LighthillOperator",
    "lighthill_divergence",
    "radial_taper",
    "smoothing_factor",
    "FluidSnapshot",
    "SnapshotSeries",
    "farfield_at_points",
    "farfield_pressure",
    "potential_velocity",
    "vortex_centers",
    "vortex_velocity",
]
