from pathlib import Path
from typing import Union

from ..models.cutmesh import CutMesh


def write_cutmesh(cut: CutMesh, path: Union[str, Path], dump_polytopes: bool = False) -> Path:
    """
    One line per record: acoustic_id fluid_id volume provenance.

    With dump_polytopes each record is followed by its vertices and face
    cycles, indented by two spaces.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as handle:
        for i, (a, f, volume, provenance) in enumerate(cut.rows()):
            handle.write(f"{a} {f} {volume!r} {provenance}\n")
            if dump_polytopes:
                poly = cut.polytope(i)
                handle.write(f"  vertices {len(poly.vertices)}\n")
                for x, y, z in poly.vertices.tolist():
                    handle.write(f"  {x!r} {y!r} {z!r}\n")
                handle.write(f"  faces {poly.n_faces}\n")
                for face in poly.faces:
                    handle.write(f"  {len(face)} " + " ".join(map(str, face)) + "\n")
    return path
