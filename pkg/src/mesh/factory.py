import logging
from typing import Optional

from ..models.config import MeshKind, MeshSpec
from ..models.mesh import Aabb, PolyMesh
from .generators import generate_cartesian, generate_distorted, generate_o_grid, restrict_to_disk
from .io import read_mesh

logger = logging.getLogger(__name__)


def build_mesh(spec: MeshSpec, seed: int = 0, validate: bool = True) -> PolyMesh:
    """Generate or read the mesh a configuration section describes."""
    bounds = Aabb(spec.lower, spec.upper)
    name: Optional[str] = spec.name
    if spec.kind is MeshKind.FILE:
        mesh = read_mesh(spec.path, validate=validate)
    elif spec.kind is MeshKind.O_GRID:
        mesh = generate_o_grid(spec.half_width, spec.block_cells, spec.outer_radius, spec.rings, spec.thickness)
    else:
        mesh = generate_cartesian(bounds, spec.cells)
        if spec.kind is MeshKind.DISTORTED:
            mesh = generate_distorted(mesh, spec.amplitude, spec.seed if spec.seed is not None else seed)
        elif spec.kind is MeshKind.DISK:
            mesh = restrict_to_disk(mesh, spec.radius)
    if name:
        mesh = PolyMesh(mesh.vertices, mesh.faces, mesh.cell_faces, mesh.cell_signs, name=name)
    logger.info("mesh %s (%s): %d cells, %d faces", mesh.name, spec.kind.value, mesh.n_cells, mesh.n_faces)
    return mesh
