import logging
from pathlib import Path
from typing import Iterator, List, Tuple, Union

import numpy as np

from ..models.errors import MeshParseError
from ..models.mesh import PolyMesh
from .validation import validate_mesh

logger = logging.getLogger(__name__)

HEADER = "polymesh 1"


class MeshFileParser:
    """Line-oriented reader/writer for the polymesh text format."""

    @staticmethod
    def _lines(text: str) -> Iterator[Tuple[int, List[str]]]:
        for number, raw in enumerate(text.splitlines(), start=1):
            tokens = raw.split("#", 1)[0].split()
            if tokens:
                yield number, tokens

    @staticmethod
    def _section(lines: Iterator[Tuple[int, List[str]]], keyword: str) -> int:
        try:
            number, tokens = next(lines)
        except StopIteration:
            raise MeshParseError(f"missing '{keyword}' section")
        if len(tokens) != 2 or tokens[0] != keyword:
            raise MeshParseError(f"expected '{keyword} <count>'", number)
        try:
            count = int(tokens[1])
        except ValueError:
            raise MeshParseError(f"invalid {keyword} count '{tokens[1]}'", number)
        if count < 0:
            raise MeshParseError(f"negative {keyword} count", number)
        return count

    @staticmethod
    def _row(lines: Iterator[Tuple[int, List[str]]], keyword: str) -> Tuple[int, List[str]]:
        try:
            return next(lines)
        except StopIteration:
            raise MeshParseError(f"unexpected end of file in '{keyword}' section")

    @classmethod
    def parse(cls, text: str, name: str = "mesh") -> PolyMesh:
        lines = cls._lines(text)
        try:
            number, tokens = next(lines)
        except StopIteration:
            raise MeshParseError("empty mesh file")
        if " ".join(tokens) != HEADER:
            raise MeshParseError(f"expected header '{HEADER}'", number)

        n_vertices = cls._section(lines, "vertices")
        vertices = np.empty((n_vertices, 3))
        for i in range(n_vertices):
            number, tokens = cls._row(lines, "vertices")
            if len(tokens) != 3:
                raise MeshParseError("vertex needs 3 coordinates", number)
            try:
                vertices[i] = [float(t) for t in tokens]
            except ValueError:
                raise MeshParseError("invalid vertex coordinate", number)

        n_faces = cls._section(lines, "faces")
        faces = []
        for _ in range(n_faces):
            number, tokens = cls._row(lines, "faces")
            ints = cls._ints(tokens, number)
            if ints[0] < 3 or len(ints) != ints[0] + 1:
                raise MeshParseError("face needs a count >= 3 followed by that many vertices", number)
            if any(v < 0 or v >= n_vertices for v in ints[1:]):
                raise MeshParseError("face references a missing vertex", number)
            faces.append(tuple(ints[1:]))

        n_cells = cls._section(lines, "cells")
        cell_faces, cell_signs = [], []
        for _ in range(n_cells):
            number, tokens = cls._row(lines, "cells")
            ints = cls._ints(tokens, number)
            if ints[0] < 1 or len(ints) != ints[0] + 1:
                raise MeshParseError("cell needs a face count followed by that many faces", number)
            fs, ss = [], []
            for code in ints[1:]:
                f, s = (code, 1) if code >= 0 else (-code - 1, -1)
                if f >= n_faces:
                    raise MeshParseError(f"cell references missing face {f}", number)
                fs.append(f)
                ss.append(s)
            cell_faces.append(tuple(fs))
            cell_signs.append(tuple(ss))

        trailing = next(lines, None)
        if trailing is not None:
            raise MeshParseError("unexpected content after cells section", trailing[0])
        return PolyMesh(vertices, tuple(faces), tuple(cell_faces), tuple(cell_signs), name=name)

    @staticmethod
    def _ints(tokens: List[str], number: int) -> List[int]:
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise MeshParseError("expected integers", number)

    @staticmethod
    def format(mesh: PolyMesh) -> str:
        out = [HEADER, f"vertices {mesh.n_vertices}"]
        out.extend(" ".join(repr(float(x)) for x in row) for row in mesh.vertices.tolist())
        out.append(f"faces {mesh.n_faces}")
        out.extend(f"{len(f)} " + " ".join(map(str, f)) for f in mesh.faces)
        out.append(f"cells {mesh.n_cells}")
        for fs, ss in zip(mesh.cell_faces, mesh.cell_signs):
            codes = [f if s > 0 else -f - 1 for f, s in zip(fs, ss)]
            out.append(f"{len(codes)} " + " ".join(map(str, codes)))
        return "\n".join(out) + "\n"


def read_mesh(path: Union[str, Path], validate: bool = True) -> PolyMesh:
    """Read a mesh file; invariant violations raise GeometryError."""
    path = Path(path)
    mesh = MeshFileParser.parse(path.read_text(), name=path.stem)
    if validate:
        validate_mesh(mesh)
    logger.info("read mesh %s: %d cells, %d faces", path, mesh.n_cells, mesh.n_faces)
    return mesh


def write_mesh(mesh: PolyMesh, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(MeshFileParser.format(mesh))
    logger.info("wrote mesh %s: %d cells", path, mesh.n_cells)
    return path
