"""Steady-state diffusion between narrow boundary windows.

Asymptotic concentration drops and window fluxes for influx/outflux and
mixed absorbing window configurations on the unit sphere, validated
against in-house numerical oracles, plus half-space flow-line tracing.
"""

from .asymptotics import (ExpansionResult, FluxVector, d_coeff,
                          drop_close_windows, drop_interior_point,
                          drop_mixed_general, drop_mixed_three_term,
                          drop_two_window_neumann_general, sphere_drop_N,
                          sphere_drop_absorbing, sphere_drop_neumann,
                          sphere_fluxes, ubar_cj_expansion)
from .geometry import (DistanceMatrix, HalfSpace, Sphere, UnitSphere,
                       ValidatedConfig, WindowConfig, WindowSpec, load_config,
                       nondimensionalize, validate_config, window_from_angles)
from .greens import (GreensSplit, general_singular, greens_split_sphere,
                     gs_sphere_interior, gs_sphere_surface, gs_sphere_surface_r)
from .linsys import InteractionSystem, build_system, solve_exact, u_at_influx_exact
from .specfun import (DEFAULT_QUADRATURE, QuadratureSpec, bessel_j, ellipk,
                      integrate_adaptive, integrate_bessel_laplace)

__version__ = "0.1.0"
