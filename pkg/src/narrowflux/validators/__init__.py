"""Numerical ground-truth oracles: boundary-integral solver, Brownian Monte
Carlo flux splitting, and the relative-error comparison record."""

from .bem import (BemMesh, BemResult, bem_solve, cap_integral_interior,
                  cap_integral_surface, neumann_drop_quadrature,
                  neumann_relative_value, solve_mixed_axisymmetric,
                  solve_mixed_collocation)
from .mc import McConfig, McResult, mc_flux_split
from .report import OracleReport, relative_error

__all__ = [
    "BemMesh", "BemResult", "bem_solve", "cap_integral_interior",
    "cap_integral_surface", "neumann_drop_quadrature", "neumann_relative_value",
    "solve_mixed_axisymmetric", "solve_mixed_collocation",
    "McConfig", "McResult", "mc_flux_split",
    "OracleReport", "relative_error",
]
