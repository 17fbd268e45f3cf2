"""Convex polytope intersection by successive half-space clipping."""

from typing import Dict, List, Optional, Tuple

import numpy as np

from ..models.polytope import Polytope, newell_vectors

PLANE_EPS = 1e-12


def _order_cap(points: np.ndarray, ids: List[int], normal: np.ndarray) -> List[int]:
    """Order coplanar points counter-clockwise around the normal."""
    pts = points[ids]
    centre = pts.mean(axis=0)
    u = pts[0] - centre
    if np.linalg.norm(u) == 0.0:
        u = pts[1] - centre
    u = u - np.dot(u, normal) * normal
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    rel = pts - centre
    angle = np.arctan2(rel @ v, rel @ u)
    return [ids[k] for k in np.argsort(angle, kind="stable")]


def clip_halfspace(
    poly: Polytope, normal: np.ndarray, offset: float, eps: float = PLANE_EPS
) -> Optional[Polytope]:
    """Part of poly with normal . x <= offset, or None if nothing of positive volume remains."""
    verts = poly.vertices
    s = verts @ normal - offset
    tol = eps * max(poly.diameter, 1e-300)
    s = np.where(np.abs(s) <= tol, 0.0, s)
    used = sorted({v for f in poly.faces for v in f})
    if np.all(s[used] <= 0.0):
        return poly
    if np.all(s[used] >= 0.0):
        return None

    new_points: List[np.ndarray] = []
    index: Dict[int, int] = {}
    for v in used:
        if s[v] <= 0.0:
            index[v] = len(new_points)
            new_points.append(verts[v])
    crossing: Dict[Tuple[int, int], int] = {}

    def cut(a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        if key not in crossing:
            lo, hi = key
            t = s[lo] / (s[lo] - s[hi])
            crossing[key] = len(new_points)
            new_points.append(verts[lo] + t * (verts[hi] - verts[lo]))
        return crossing[key]

    faces: List[Tuple[int, ...]] = []
    cap = set()
    for cyc in poly.faces:
        out: List[int] = []
        for k, a in enumerate(cyc):
            b = cyc[(k + 1) % len(cyc)]
            if s[a] <= 0.0:
                out.append(index[a])
                if s[a] == 0.0:
                    cap.add(index[a])
            if s[a] * s[b] < 0.0:
                c = cut(a, b)
                out.append(c)
                cap.add(c)
        # collapse consecutive repeats
        dedup = [v for i, v in enumerate(out) if v != out[i - 1]] if len(out) > 1 else out
        if len(dedup) >= 3 and not all(v in cap for v in dedup):
            faces.append(tuple(dedup))

    points = np.asarray(new_points)
    if len(cap) >= 3:
        faces.append(tuple(_order_cap(points, sorted(cap), normal)))
    area = np.linalg.norm(newell_vectors(points, faces), axis=1)
    faces = [f for f, a in zip(faces, area) if a > 1e-14 * poly.diameter**2]
    if len(faces) < 4:
        return None
    used_ids = sorted({v for f in faces for v in f})
    remap = {old: new for new, old in enumerate(used_ids)}
    return Polytope.from_faces(points[used_ids], [tuple(remap[v] for v in f) for f in faces])


def clip_convex(p: Polytope, q: Polytope, eps_vol: Optional[float] = None) -> Optional[Polytope]:
    """
    Intersection of two convex polytopes: p clipped by every face plane of q.

    Results with volume below eps_vol (default 1e-14 * min volume) are
    reported as empty.
    """
    if eps_vol is None:
        eps_vol = 1e-14 * min(p.volume, q.volume)
    result: Optional[Polytope] = p
    for normal, offset in zip(q.normals, q.offsets):
        result = clip_halfspace(result, normal, float(offset))
        if result is None:
            return None
    if result.volume <= eps_vol:
        return None
    return result
