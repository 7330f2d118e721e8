"""Closed-form small-radius expansions for window concentration drops and fluxes.

Every expansion returns a term-by-term breakdown (leading order in eps,
the eps^2 log(eps) curvature term, and where available the quadratic
term) so each order can be tested independently.  The unit-sphere
formulas are specializations of the general-domain expressions with
constant curvature H = 1 and the closed-form Green's function.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError, ValidityWarning
from .geometry import DistanceMatrix
from .greens import (SPHERE_MEAN_CURVATURE, SPHERE_REGULAR_PART,
                     gs_sphere_interior, gs_sphere_surface, gs_sphere_surface_r)
from .specfun import (DEFAULT_QUADRATURE, QuadratureSpec, ellipk, ellipk_param,
                      integrate_adaptive)

__all__ = [
    "ExpansionResult",
    "FluxVector",
    "d_coeff",
    "drop_two_window_neumann_general",
    "drop_interior_point",
    "drop_close_windows",
    "close_window_leading_coefficient",
    "drop_mixed_general",
    "drop_mixed_three_term",
    "sphere_drop_neumann",
    "sphere_drop_absorbing",
    "sphere_drop_N",
    "sphere_fluxes",
    "ubar_cj_expansion",
    "interaction_coefficient",
]

_EPS_VALIDITY = 0.2  # comparisons against numerics degrade beyond this radius


@dataclass(frozen=True)
class ExpansionResult:
    """Term-by-term value of an expansion; ``total`` sums the present terms."""

    leading: float
    log_term: float
    quad_term: float | None
    order: str  # "two_term" or "three_term"

    @property
    def total(self) -> float:
        t = self.leading + self.log_term
        if self.quad_term is not None:
            t += self.quad_term
        return t


@dataclass(frozen=True)
class FluxVector:
    """Exit-window flux constants C_j (j = 2..N) and fluxes Phi_j = 2 pi eps C_j."""

    weber_constants: np.ndarray
    eps: float

    def __post_init__(self):
        arr = np.asarray(self.weber_constants, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "weber_constants", arr)

    @property
    def fluxes(self) -> np.ndarray:
        return 2.0 * np.pi * self.eps * self.weber_constants

    @property
    def total_flux(self) -> float:
        return float(np.sum(self.fluxes))


def _check_eps(eps: float) -> None:
    if eps <= 0:
        raise DomainError("eps must be positive")
    if eps > _EPS_VALIDITY:
        warnings.warn(f"eps = {eps} exceeds the validated range (<= 0.2)",
                      ValidityWarning, stacklevel=3)


def interaction_coefficient(l) -> float:
    """Pairwise sphere interaction 1/l - log(l^2/2 + l)/2 = 2 pi (G(l) - v)."""
    larr = np.asarray(l, dtype=float)
    if np.any(larr <= 0):
        raise DomainError("distance must be positive")
    out = 1.0 / larr - 0.5 * np.log(0.5 * larr * larr + larr)
    return float(out) if np.isscalar(l) or larr.ndim == 0 else out


def d_coeff(H: float, eps: float, v: float) -> float:
    """Capacitance-like self coefficient of an absorbing window.

    d = -(H/2) log(eps) + (1 - log 2)/2 * H + 2 pi v.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    return (-0.5 * H * np.log(eps) + 0.5 * (1.0 - np.log(2.0)) * H
            + 2.0 * np.pi * v)


def drop_two_window_neumann_general(H1: float, H2: float, eps: float,
                                    quad_data: dict | None = None) -> ExpansionResult:
    """Concentration drop between an influx and an outflux window (general domain).

    Two-term: 2 eps - (H1 + H2)/4 * eps^2 log(eps).  With ``quad_data``
    (keys ``v1``, ``v2``, ``gs12``) the quadratic term
    ((H1 + H2)/8 + pi (v1 + v2 - 2 gs12)) eps^2 is added.
    """
    _check_eps(eps)
    leading = 2.0 * eps
    log_term = -0.25 * (H1 + H2) * eps * eps * np.log(eps)
    if quad_data is None:
        return ExpansionResult(leading, log_term, None, "two_term")
    quad = ((H1 + H2) / 8.0
            + np.pi * (quad_data["v1"] + quad_data["v2"] - 2.0 * quad_data["gs12"]))
    return ExpansionResult(leading, log_term, quad * eps * eps, "three_term")


def drop_interior_point(eps: float, y, x1, x2, H1: float = SPHERE_MEAN_CURVATURE,
                        H2: float = SPHERE_MEAN_CURVATURE,
                        greens_data: dict | None = None) -> float:
    """Drop between the influx window center and an interior point y.

    Influx at x1, outflux at x2, both on the boundary.  ``greens_data``
    supplies ``gs12`` = G(x2; x1), ``v1``, and the interior kernel values
    ``gy1`` = G(y; x1), ``gy2`` = G(y; x2); when omitted the unit-sphere
    closed forms are used.
    """
    _check_eps(eps)
    y = np.asarray(y, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    for xj in (x1, x2):
        if np.linalg.norm(y - xj) < 2.0 * eps:
            raise DomainError("interior point too close to a window center")
    if greens_data is None:
        greens_data = {
            "gs12": gs_sphere_surface(x1, x2),
            "v1": SPHERE_REGULAR_PART,
            "gy1": gs_sphere_interior(y, x1),
            "gy2": gs_sphere_interior(y, x2),
        }
    quad = (H1 / 8.0 + np.pi * greens_data["v1"] - np.pi * greens_data["gs12"]
            - np.pi * (greens_data["gy1"] - greens_data["gy2"]))
    return float(eps - 0.25 * H1 * eps * eps * np.log(eps) + quad * eps * eps)


# ---------------------------------------------------------------------------
# close windows (center separation comparable to the radius)


def close_window_leading_coefficient(eta: float, spec: QuadratureSpec | None = None,
                                     convention: str = "modulus") -> float:
    """Leading drop coefficient 2 - (4/pi) int_0^1 u/(eta+u) K(2 sqrt(eta u)/(eta+u)) du.

    ``convention`` selects how the elliptic-integral argument is read:
    ``"modulus"`` is the mathematically exact reduction of the azimuthal
    integral (matches direct 2D quadrature; recovers 2 - 1/eta + O(1/eta^3)
    for well-separated windows), while ``"parameter"`` feeds the argument
    as m = k^2, reproducing the published tangent-window reference value
    1.41676 that was computed under that calling convention.
    """
    if eta < 2.0:
        raise DomainError("eta = l/eps must be at least 2 (tangency)")
    spec = spec or DEFAULT_QUADRATURE
    if convention == "modulus":
        kfun = ellipk
    elif convention == "parameter":
        kfun = ellipk_param
    else:
        raise DomainError(f"unknown elliptic convention {convention!r}")

    def integrand(u):
        return u / (eta + u) * kfun(2.0 * np.sqrt(eta * u) / (eta + u))

    val = integrate_adaptive(integrand, 0.0, 1.0, spec)
    return 2.0 - 4.0 / np.pi * val


def _close_log_double_integral(eta: float) -> float:
    """int_0^{2pi} int_0^1 log(eta^2 - 2 eta u cos(t) + u^2) u du dt.

    Closed form 2 pi log(eta) for eta >= 1: the azimuthal integral of
    log(a^2 - 2ab cos t + b^2) equals 4 pi log(max(a, b)).
    """
    if eta < 1.0:
        raise DomainError("closed form requires eta >= 1")
    return 2.0 * np.pi * np.log(eta)


def drop_close_windows(eps: float, eta: float, H1: float = 0.0, H2: float = 0.0,
                       spec: QuadratureSpec | None = None,
                       convention: str = "modulus") -> ExpansionResult:
    """Drop for two flux windows separated by l = eta * eps, eta >= 2.

    The eps^2 log(eps) contributions of the two windows cancel, leaving a
    leading term from the elliptic quadrature and a curvature term
    (1/8 + log(eta)/4)(H1 + H2) eps^2.
    """
    _check_eps(eps)
    coef = close_window_leading_coefficient(eta, spec, convention)
    quad = (0.125 + _close_log_double_integral(eta) / (8.0 * np.pi)) * (H1 + H2)
    return ExpansionResult(coef * eps, 0.0, quad * eps * eps, "three_term")


# ---------------------------------------------------------------------------
# mixed configurations (one influx, N-1 absorbing windows)


def drop_mixed_general(N: int, H, eps: float) -> ExpansionResult:
    """Two-term drop at the influx window with N - 1 absorbing exits.

    u(x1) = eps (1 + pi/(4(N-1))) - (H1 + sum_i H_i / (N-1)^2) eps^2 log(eps)/4.
    """
    if N < 2:
        raise DomainError("need at least one absorbing window")
    _check_eps(eps)
    H = np.asarray(H, dtype=float)
    if H.shape != (N,):
        raise DimensionMismatchError(f"expected {N} curvature values")
    leading = (1.0 + np.pi / (4.0 * (N - 1))) * eps
    coef = H[0] + np.sum(H[1:]) / (N - 1) ** 2
    log_term = -0.25 * coef * eps * eps * np.log(eps)
    return ExpansionResult(leading, log_term, None, "two_term")


def drop_mixed_three_term(eps: float, H, v, gs_table) -> ExpansionResult:
    """Three-term drop at the influx window, general domain data.

    ``gs_table`` is the symmetric N x N matrix of Green's function values
    between window centers (diagonal unused); window 0 is the influx.
    """
    _check_eps(eps)
    H = np.asarray(H, dtype=float)
    v = np.asarray(v, dtype=float)
    G = np.asarray(gs_table, dtype=float)
    N = H.shape[0]
    if N < 2:
        raise DomainError("need at least one absorbing window")
    if v.shape != (N,) or G.shape != (N, N):
        raise DimensionMismatchError("H, v and gs_table sizes disagree")
    n1 = N - 1
    leading = (1.0 + np.pi / (4.0 * n1)) * eps
    log_term = -0.25 * (H[0] + np.sum(H[1:]) / n1 ** 2) * eps * eps * np.log(eps)
    pair_sum = 0.0
    for i in range(1, N):
        for j in range(i + 1, N):
            pair_sum += G[i, j]
    quad = (H[0] / 8.0
            + (1.0 - np.log(2.0)) / (4.0 * n1 ** 2) * np.sum(H[1:])
            + np.pi * v[0] + np.pi / n1 ** 2 * np.sum(v[1:])
            + 2.0 * np.pi / n1 ** 2 * pair_sum
            - 2.0 * np.pi / n1 * np.sum(G[0, 1:]))
    return ExpansionResult(leading, log_term, quad * eps * eps, "three_term")


def sphere_drop_neumann(eps: float, l: float) -> ExpansionResult:
    """Unit-sphere drop between influx and outflux windows at chord distance l."""
    _check_eps(eps)
    if not 2.0 * eps <= l <= 2.0 + 1e-12:
        raise DomainError("chord distance must satisfy 2 eps <= l <= 2")
    return drop_two_window_neumann_general(
        SPHERE_MEAN_CURVATURE, SPHERE_MEAN_CURVATURE, eps,
        quad_data={"v1": SPHERE_REGULAR_PART, "v2": SPHERE_REGULAR_PART,
                   "gs12": gs_sphere_surface_r(l)})


def sphere_drop_N(eps: float, dist: DistanceMatrix) -> ExpansionResult:
    """Unit-sphere drop at the influx window with N - 1 absorbing exits.

    Specializes the general three-term expansion with H = 1 and the
    closed-form Green's function; the pairwise interaction enters through
    1/l - log(l^2/2 + l)/2 sums over exit pairs and influx-exit pairs.
    """
    N = dist.n
    if N < 2:
        raise DomainError("need at least one absorbing window")
    l = dist.l
    if np.any(l[np.triu_indices(N, k=1)] < 2.0 * eps - 1e-12):
        raise DomainError("windows must be separated by at least one diameter")
    G = np.zeros((N, N))
    iu = np.triu_indices(N, k=1)
    G[iu] = gs_sphere_surface_r(l[iu])
    G = G + G.T
    return drop_mixed_three_term(eps, np.ones(N),
                                 np.full(N, SPHERE_REGULAR_PART), G)


def sphere_drop_absorbing(eps: float, l: float) -> ExpansionResult:
    """Unit-sphere drop with a single absorbing exit at chord distance l.

    Exact N = 2 reduction of :func:`sphere_drop_N`.
    """
    if not 2.0 * eps <= l <= 2.0 + 1e-12:
        raise DomainError("chord distance must satisfy 2 eps <= l <= 2")
    return sphere_drop_N(eps, DistanceMatrix(np.array([[0.0, l], [l, 0.0]])))


def sphere_fluxes(eps: float, dist: DistanceMatrix) -> FluxVector:
    """Two-term exit fluxes on the unit sphere (mixed configuration).

    C_j = -eps/(2(N-1)) - (2 eps^2/(N-1)) [ sum_{i != j} (g(l_1j) - g(l_1i)
    - g(l_ij)) + 2/(N-1) sum_{i<k} g(l_ik) ] with g the regular-subtracted
    surface kernel; the corrections sum to zero so the compatibility
    constraint sum C_j = -eps/2 holds identically.
    """
    _check_eps(eps)
    N = dist.n
    if N < 2:
        raise DomainError("need at least one absorbing window")
    l = dist.l

    def ghat(d):
        return gs_sphere_surface_r(d) - SPHERE_REGULAR_PART

    n1 = N - 1
    pair_sum = 0.0
    for i in range(1, N):
        for k in range(i + 1, N):
            pair_sum += ghat(l[i, k])
    C = np.empty(n1)
    for jj in range(1, N):
        s1 = 0.0
        for i in range(1, N):
            if i == jj:
                continue
            s1 += ghat(l[0, jj]) - ghat(l[0, i]) - ghat(l[i, jj])
        C[jj - 1] = (-eps / (2.0 * n1)
                     - 2.0 * eps * eps / n1 * (s1 + 2.0 * pair_sum / n1))
    return FluxVector(C, eps)


def ubar_cj_expansion(eps: float, greens_table, d) -> tuple[float, FluxVector]:
    """Mean concentration and flux constants through quadratic order.

    ``greens_table`` is the N x N matrix of pairwise Green's values
    (window 0 = influx, diagonal unused); ``d`` the N - 1 self
    coefficients of the absorbing windows in exit order.
    """
    _check_eps(eps)
    G = np.asarray(greens_table, dtype=float)
    d = np.asarray(d, dtype=float)
    N = G.shape[0]
    if G.shape != (N, N) or d.shape != (N - 1,):
        raise DimensionMismatchError("greens_table and d sizes disagree")
    n1 = N - 1
    pair_sum = 0.0
    for i in range(1, N):
        for j in range(i + 1, N):
            pair_sum += G[i, j]
    b = G[0, 1:]
    ubar = (np.pi * eps / (4.0 * n1)
            + eps * eps / (2.0 * n1 ** 2) * np.sum(d)
            + 2.0 * np.pi * eps * eps / n1 ** 2 * pair_sum
            - np.pi * eps * eps / n1 * np.sum(b))
    C = np.empty(n1)
    for jj in range(1, N):
        dsum = 0.0
        gsum = 0.0
        for i in range(1, N):
            if i == jj:
                continue
            dsum += d[i - 1] - d[jj - 1]
            gsum += G[0, jj] - G[0, i] - G[i, jj]
        bracket = dsum + 2.0 * np.pi * n1 * gsum + 4.0 * np.pi * pair_sum
        C[jj - 1] = -eps / (2.0 * n1) - eps * eps / (np.pi * n1 ** 2) * bracket
    return float(ubar), FluxVector(C, eps)
