# Mesh data model, generators, geometry and file I/O
from .cells import cell_polytope, hex_corner_ids, hex_element, hex_elements
from .generators import (
    extrude_polygons,
    generate_cartesian,
    generate_distorted,
    generate_o_grid,
    restrict_to_disk,
    submesh,
)
from .io import read_mesh, write_mesh
from .validation import MeshReport, MeshTolerances, validate_mesh

__all__ = [
    "cell_polytope",
    "hex_corner_ids",
    "hex_element",
    "hex_elements",
    "extrude_polygons",
    "generate_cartesian",
    "generate_distorted",
    "generate_o_grid",
    "restrict_to_disk",
    "submesh",
    "read_mesh",
    "write_mesh",
    "MeshReport",
    "MeshTolerances",
    "validate_mesh",
]
