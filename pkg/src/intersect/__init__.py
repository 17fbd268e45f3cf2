# Mesh intersection: broad phase, containment shortcut, SAT and convex clipping
from .broad_phase import aabb_overlap, broad_phase
from .clipping import clip_convex, clip_halfspace
from .engine import compute_intersection
from .export import write_cutmesh
from .report import IntersectionReport, intersection_report
from .sat import sat_intersects
from .trilinear import inverse_trilinear, inverse_trilinear_many

__all__ = [
    "aabb_overlap",
    "broad_phase",
    "clip_convex",
    "clip_halfspace",
    "compute_intersection",
    "write_cutmesh",
    "IntersectionReport",
    "intersection_report",
    "sat_intersects",
    "inverse_trilinear",
    "inverse_trilinear_many",
]
