"""Special functions and quadrature engines used by the rest of the library.

The semi-infinite Laplace/Bessel integrals are the workhorse for the
half-space solutions: kernels of the form ``exp(-m*z) * g(m)`` where ``g``
is built from Bessel-function products.  For ``z = 0`` these are only
conditionally convergent, so the tail is summed block-by-block over the
oscillation scale and accelerated with Wynn's epsilon algorithm (iterated
Shanks transformation).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate as _sciint
from scipy import special as _scisp

from .errors import DomainError, NonConvergenceError, SlowDecayWarning

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "ellipk",
    "bessel_j",
    "integrate_adaptive",
    "integrate_bessel_laplace",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budgets for the quadrature engines.

    ``tail_policy`` selects how semi-infinite integrals treat the tail:
    ``"extrapolate"`` (epsilon acceleration of block sums, required when
    the integrand decays only algebraically) or ``"truncate"`` (hard
    exponential cutoff, valid for z > 0).
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    tail_policy: str = "extrapolate"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be at least 10")
        if self.tail_policy not in ("extrapolate", "truncate"):
            raise DomainError(f"unknown tail_policy {self.tail_policy!r}")


DEFAULT_QUADRATURE = QuadratureSpec()

_AGM_TOL = 1e-15  # internal AGM stop; gives full double precision


def ellipk(k):
    """Complete elliptic integral of the first kind, modulus convention.

    K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), computed by the
    arithmetic-geometric mean iteration (quadratic convergence).

    Accepts a scalar or array of moduli with 0 <= k < 1.
    """
    karr = np.asarray(k, dtype=float)
    if np.any(karr < 0) or np.any(karr >= 1):
        raise DomainError("ellipk requires modulus 0 <= k < 1")
    a = np.ones_like(karr)
    b = np.sqrt(1.0 - karr * karr)
    for _ in range(40):
        if np.all(np.abs(a - b) <= _AGM_TOL * a):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    out = np.pi / (2.0 * a)
    return float(out) if np.isscalar(k) or karr.ndim == 0 else out


def ellipk_param(m):
    """K evaluated with a parameter argument, K(sqrt(m)).

    Provided so published reference values computed under the m = k^2
    calling convention (e.g. Matlab's ``ellipke``) can be reproduced
    exactly; see :func:`narrowflux.asymptotics.drop_close_windows`.
    """
    marr = np.asarray(m, dtype=float)
    if np.any(marr < 0) or np.any(marr >= 1):
        raise DomainError("ellipk_param requires parameter 0 <= m < 1")
    return ellipk(np.sqrt(marr))


def bessel_j(order: int, x):
    """Bessel function of the first kind, orders 0 and 1 only.

    Backed by scipy's minimax implementations (abs error well below the
    1e-12 contract on x >= 0).
    """
    xarr = np.asarray(x, dtype=float)
    if np.any(xarr < 0):
        raise DomainError("bessel_j requires x >= 0")
    if order == 0:
        out = _scisp.j0(xarr)
    elif order == 1:
        out = _scisp.j1(xarr)
    else:
        raise DomainError("only orders 0 and 1 are supported")
    return float(out) if np.isscalar(x) or xarr.ndim == 0 else out


def integrate_adaptive(f, a: float, b: float, spec: QuadratureSpec | None = None,
                       points=None) -> float:
    """Adaptive quadrature of ``f`` on the finite interval [a, b].

    Integrable endpoint singularities are fine.  ``points`` marks known
    interior breakpoints/singularities for the subdivision strategy.
    Raises :class:`NonConvergenceError` if the error estimate exceeds the
    requested tolerance by more than a factor of ten.
    """
    spec = spec or DEFAULT_QUADRATURE
    if not a < b:
        raise DomainError("integrate_adaptive requires a < b")
    with warnings.catch_warnings():
        # the returned error estimate is vetted below
        warnings.simplefilter("ignore", _sciint.IntegrationWarning)
        val, err = _sciint.quad(f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                limit=spec.max_subdivisions, points=points)
    if err > 10.0 * max(spec.abs_tol, spec.rel_tol * abs(val), 1e-300):
        raise NonConvergenceError(
            f"adaptive quadrature error estimate {err:.3e} exceeds tolerance")
    return val


# ---------------------------------------------------------------------------
# semi-infinite Laplace/Bessel integrals


_GL_NODES, _GL_WEIGHTS = leggauss(32)


def _wynn_epsilon(partial):
    """Best limit estimate for a sequence of partial sums (even epsilon columns)."""
    cur = list(partial)
    prev = [0.0] * (len(cur) + 1)
    best = cur[-1]
    for k in range(1, len(partial)):
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0.0:
                d = 1e-300
            nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        if k % 2 == 0 and cur and np.isfinite(cur[-1]):
            best = cur[-1]
    return best


def _semi_infinite_blocks(g, z: float, spec: QuadratureSpec, osc_scale: float,
                          n_components: int = 1):
    """Shared engine: returns (values array, stalled flag).

    ``g(m)`` must map an array of nodes to shape (n_components, len(m))
    (or (len(m),) for a single component).
    """
    if z < 0:
        raise DomainError("z must be nonnegative")
    h = np.pi / max(osc_scale, 1e-6)
    # beyond m*z ~ 45 the damped tail is below double-precision resolution
    m_cut = np.inf if z == 0.0 else 45.0 / z
    tol = max(spec.abs_tol, 1e-14)

    partials = [[] for _ in range(n_components)]
    total = np.zeros(n_components)
    best = total.copy()
    prev_best = None
    small_streak = 0
    stable_streak = 0
    for k in range(spec.max_subdivisions):
        m0 = k * h
        if m0 > m_cut:
            return total, False
        mm = m0 + 0.5 * h * (_GL_NODES + 1.0)
        w = 0.5 * h * _GL_WEIGHTS
        vals = np.atleast_2d(np.asarray(g(mm), dtype=float))
        if z > 0.0:
            vals = vals * np.exp(-mm * z)
        contrib = vals @ w
        total = total + contrib
        for c in range(n_components):
            partials[c].append(total[c])

        scale = max(np.max(np.abs(total)), np.max(np.abs(best)), 1.0)
        if np.max(np.abs(contrib)) < 0.05 * max(tol, spec.rel_tol * scale):
            small_streak += 1
            if small_streak >= 2 and k >= 2:
                return total, False
        else:
            small_streak = 0

        if k >= 5:
            tail = min(len(partials[0]), 24)
            best = np.array([_wynn_epsilon(partials[c][-tail:])
                             for c in range(n_components)])
            if prev_best is not None:
                delta = np.max(np.abs(best - prev_best))
                if delta < max(tol, spec.rel_tol * np.max(np.abs(best)) + 1e-300):
                    stable_streak += 1
                    if stable_streak >= 2:
                        return best, False
                else:
                    stable_streak = 0
            prev_best = best
    if z == 0.0 and spec.tail_policy == "extrapolate":
        return (best if prev_best is not None else total), True
    raise NonConvergenceError(
        "semi-infinite integral did not converge within the block budget")


def integrate_bessel_laplace(g, z: float, spec: QuadratureSpec | None = None,
                             osc_scale: float = 1.0) -> float:
    """Compute int_0^inf exp(-m z) g(m) dm for oscillatory-decaying g.

    ``osc_scale`` is the dominant asymptotic wavenumber of ``g`` (for a
    product like J0(m a) J1(m b) pass a + b); blocks of length
    pi / osc_scale are summed and the tail is accelerated.  For z = 0 the
    integrand must decay at least like m^{-1/2} for the accelerated sum
    to converge.  Emits :class:`SlowDecayWarning` if the z = 0
    extrapolation stalls, and returns the best available estimate.
    """
    spec = spec or DEFAULT_QUADRATURE
    value, stalled = _semi_infinite_blocks(g, z, spec, osc_scale, n_components=1)
    if stalled:
        warnings.warn("tail extrapolation stalled; returning best estimate",
                      SlowDecayWarning, stacklevel=2)
    return float(value[0])


def integrate_bessel_laplace_multi(g, z: float, spec: QuadratureSpec | None = None,
                                   osc_scale: float = 1.0) -> np.ndarray:
    """Vector version: g(m) returns shape (n, len(m)); kernels share blocks.

    Used by the half-space gradient so both components reuse the same
    quadrature nodes (one pass over the common exp(-m z) factor).
    """
    spec = spec or DEFAULT_QUADRATURE
    probe = np.atleast_2d(np.asarray(g(np.array([0.5 / max(osc_scale, 1e-6)])),
                                     dtype=float))
    value, stalled = _semi_infinite_blocks(g, z, spec, osc_scale,
                                           n_components=probe.shape[0])
    if stalled:
        warnings.warn("tail extrapolation stalled; returning best estimate",
                      SlowDecayWarning, stacklevel=2)
    return value
