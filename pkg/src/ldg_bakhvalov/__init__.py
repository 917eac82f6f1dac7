"""Local discontinuous Galerkin method on Bakhvalov-type meshes.

Model problem: ``-eps*Lap(u) + alpha.grad(u) + b*u = f`` on the unit square
with homogeneous Dirichlet data and exponential layers at ``x = 1``, ``y = 1``.
"""

from .assembly import FluxParams, LinearSystem, apply_B, assemble
from .dg_space import DGField, DGSolution
from .mesh import Mesh1D, Mesh2D, MeshConfig, build_mesh_1d, build_mesh_2d, check_mesh_properties
from .norms import ErrorBreakdown, energy_norm, interpolation_error, supercloseness_error, true_error
from .problems import ProblemSpec, make_problem, residual_check
from .projections import interpolate, interpolate_flux, interpolate_P_minus, project, project_element
from .quadrature import affine_map, gauss_legendre_rule, legendre_table
from .solver import SolverConfig, solve
from .study import RunConfig, emit, run_convergence

__all__ = [
    "DGField", "DGSolution", "ErrorBreakdown", "FluxParams", "LinearSystem", "Mesh1D", "Mesh2D",
    "MeshConfig", "ProblemSpec", "RunConfig", "SolverConfig", "affine_map", "apply_B", "assemble",
    "build_mesh_1d", "build_mesh_2d", "check_mesh_properties", "emit", "energy_norm",
    "gauss_legendre_rule", "interpolate", "interpolate_P_minus", "interpolate_flux",
    "interpolation_error", "legendre_table", "make_problem", "project", "project_element",
    "residual_check", "run_convergence", "solve", "supercloseness_error", "true_error",
]
