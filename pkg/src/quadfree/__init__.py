# Quadrature-free integration over convex polytopes
from .cache import MonomialCache
from .check import integration_check
from .integrator import HomogeneousIntegrator, integrate_monomial, integrate_polynomial, moment_tensor
from .meshes import box_moment_tensor, box_monomial_integral, integrate_over_cutmesh, integrate_over_mesh, relative_error
from .tessellation import integrate_tessellated, tessellation_rule

__all__ = [
    "MonomialCache",
    "integration_check",
    "HomogeneousIntegrator",
    "integrate_monomial",
    "integrate_polynomial",
    "moment_tensor",
    "box_moment_tensor",
    "box_monomial_integral",
    "integrate_over_cutmesh",
    "integrate_over_mesh",
    "relative_error",
    "integrate_tessellated",
    "tessellation_rule",
]
