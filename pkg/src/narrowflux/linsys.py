"""Exact finite-radius solve of the window-interaction system (mixed problem).

The absorbing-window constants C_j and the mean concentration ubar are
obtained from the augmented saddle system

    [ (pi/2) I + eps M    1 ] [ C    ]   [ -pi eps^2 b ]
    [        1^T          0 ] [ ubar ] = [ -eps / 2    ]

which imposes the flux-compatibility constraint as a row instead of
inverting (pi/2) I + eps M by a truncated geometric series.  The result
is exact at finite eps and serves as the sharp reference the quadratic
expansions are measured against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .asymptotics import FluxVector, d_coeff
from .errors import DomainError, SingularSystemError
from .geometry import ROLE_ABSORBING, Sphere, ValidatedConfig
from .greens import SPHERE_MEAN_CURVATURE, SPHERE_REGULAR_PART, gs_sphere_surface

__all__ = ["InteractionSystem", "build_system", "solve_exact", "u_at_influx_exact"]

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class InteractionSystem:
    """Assembled interaction matrix M, influx coupling b and radius eps."""

    M: np.ndarray
    b: np.ndarray
    eps: float
    gs_influx: np.ndarray  # G(x_j; x_1) for the influx-window evaluation

    @property
    def n_exits(self) -> int:
        return self.b.shape[0]


def build_system(cfg: ValidatedConfig) -> InteractionSystem:
    """Assemble the exit-window interaction system for a sphere configuration.

    Diagonal entries are the self coefficients d_i (H = 1, sphere regular
    part), off-diagonals 2 pi G(x_j; x_i), b_i = G(x_1; x_i).
    """
    if not isinstance(cfg.domain, Sphere) or cfg.domain.radius != 1.0:
        raise DomainError("interaction system requires the unit sphere")
    if not cfg.is_mixed():
        raise DomainError("interaction system requires one influx plus "
                          "absorbing exits")
    exits = [w for w in cfg.windows[1:]]
    assert all(w.role == ROLE_ABSORBING for w in exits)
    eps = cfg.eps
    n = len(exits)
    d = d_coeff(SPHERE_MEAN_CURVATURE, eps, SPHERE_REGULAR_PART)
    M = np.zeros((n, n))
    for i in range(n):
        M[i, i] = d
        for j in range(i + 1, n):
            gij = 2.0 * np.pi * gs_sphere_surface(exits[i].center, exits[j].center)
            M[i, j] = M[j, i] = gij
    x1 = cfg.windows[0].center
    b = np.array([gs_sphere_surface(x1, w.center) for w in exits])
    return InteractionSystem(M=M, b=b, eps=eps, gs_influx=b.copy())


def solve_exact(sys: InteractionSystem) -> tuple[float, FluxVector]:
    """Solve the augmented system for ubar and the exit constants C_j."""
    n = sys.n_exits
    eps = sys.eps
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = 0.5 * np.pi * np.eye(n) + eps * sys.M
    A[:n, n] = 1.0
    A[n, :n] = 1.0
    rhs = np.empty(n + 1)
    rhs[:n] = -np.pi * eps * eps * sys.b
    rhs[n] = -0.5 * eps
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularSystemError(f"condition number {cond:.3e} too large")
    sol = np.linalg.solve(A, rhs)
    return float(sol[n]), FluxVector(sol[:n], eps)


def u_at_influx_exact(cfg: ValidatedConfig, ubar: float, flux: FluxVector) -> float:
    """Concentration at the influx-window center from a solved system.

    u(x1) = ubar + (self window integral) + 2 pi eps sum_j C_j G(x_j; x_1),
    with the self integral eps - eps^2 log(eps)/4 + eps^2/8 + pi v eps^2
    (sphere curvature and regular part), and the C_j taken at their
    solved finite-eps values.
    """
    eps = cfg.eps
    x1 = cfg.windows[0].center
    self_term = (eps - 0.25 * eps * eps * np.log(eps) + eps * eps / 8.0
                 + np.pi * SPHERE_REGULAR_PART * eps * eps)
    cross = sum(2.0 * np.pi * eps * c * gs_sphere_surface(w.center, x1)
                for c, w in zip(flux.weber_constants, cfg.windows[1:]))
    return float(ubar + self_term + cross)
