"""
Exception hierarchy shared by every pipeline stage.

The CLI maps these onto exit codes: usage problems exit with 1, geometry
problems with 2 and solver failures with 3.
"""

from typing import List, Optional, Sequence, Tuple


class HybridCaaError(Exception):
    """Base class for all errors raised by the coupling pipeline."""


class InvalidArgumentError(HybridCaaError, ValueError):
    """A parameter is outside its documented range."""


class MeshParseError(HybridCaaError):
    """A mesh file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GeometryError(HybridCaaError):
    """A geometric invariant does not hold."""

    def __init__(
        self,
        message: str,
        *,
        cell: Optional[int] = None,
        face: Optional[int] = None,
        element: Optional[int] = None,
        pair: Optional[Tuple[int, int]] = None,
    ):
        self.cell = cell
        self.face = face
        self.element = element
        self.pair = pair
        tags = []
        if cell is not None:
            tags.append(f"cell {cell}")
        if face is not None:
            tags.append(f"face {face}")
        if element is not None:
            tags.append(f"element {element}")
        if pair is not None:
            tags.append(f"pair (K_a={pair[0]}, K_f={pair[1]})")
        if tags:
            message = f"{message} [{', '.join(tags)}]"
        super().__init__(message)


class UnsupportedGeometryError(GeometryError):
    """The exact projection path met an element it cannot integrate exactly."""


class SolverError(HybridCaaError):
    """An iterative or direct linear solve did not reach its tolerance."""

    def __init__(
        self,
        message: str,
        residual: Optional[float] = None,
        history: Optional[Sequence[float]] = None,
    ):
        self.residual = residual
        self.history: List[float] = list(history) if history is not None else []
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
