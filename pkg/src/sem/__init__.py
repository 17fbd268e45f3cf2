# Spectral-element discretisation of the wave equation
from .basis import GllBasis, build_basis, gll_nodes
from .newmark import NewmarkIntegrator, WaveState, apply_source_ramp, newmark_step
from .operators import Material, WaveOperators, assemble_operators, divergence_operators
from .output import extract_probe_line, write_field_table
from .rhs import assemble_wave_rhs
from .space import BoundaryFace, NodeTag, SemSpace, build_space

__all__ = [
    "GllBasis",
    "build_basis",
    "gll_nodes",
    "NewmarkIntegrator",
    "WaveState",
    "apply_source_ramp",
    "newmark_step",
    "Material",
    "WaveOperators",
    "assemble_operators",
    "divergence_operators",
    "extract_probe_line",
    "write_field_table",
    "assemble_wave_rhs",
    "BoundaryFace",
    "NodeTag",
    "SemSpace",
    "build_space",
]
