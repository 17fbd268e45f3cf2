# L2 projection of fluid cell data onto the acoustic space
from .coupling import CouplingSystem, assemble_coupling, assemble_mass_matrix, gauss_rule
from .fields import SeparableTrigField, cell_averages
from .norms import ErrorNorms, error_norms, l2_norm, project_function
from .solve import Projector, project, project_midpoint, project_vector

__all__ = [
    "CouplingSystem",
    "assemble_coupling",
    "assemble_mass_matrix",
    "gauss_rule",
    "SeparableTrigField",
    "cell_averages",
    "ErrorNorms",
    "error_norms",
    "l2_norm",
    "project_function",
    "Projector",
    "project",
    "project_midpoint",
    "project_vector",
]
