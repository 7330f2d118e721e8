"""Boundary-integral oracles on the unit sphere.

Three solvers of increasing generality, all built on accurate quadrature
of the exact boundary identity u(y) = ubar + sum_j int_{cap_j} G(x; y)
du/dn dA:

* influx/outflux pairs: the normal derivative is prescribed, so the drop
  is a pure quadrature of the identity (no linear solve);
* mixed N = 2 antipodal: axisymmetric collocation with a spectral
  edge-weighted density, sharp to ~1e-7;
* mixed general: ring x sector collocation with per-element
  edge-weighted densities, ~0.1% at default resolution.

Cap integrals use the chord-radius parametrization, in which the area
element of a spherical cap is exactly rho drho dphi, and reduce the
azimuthal direction to complete elliptic integrals where the kernel is
singular.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..asymptotics import FluxVector
from ..errors import DomainError, ResolutionError, SingularSystemError
from ..geometry import Sphere, ValidatedConfig
from ..greens import SPHERE_REGULAR_PART, gs_sphere_interior, gs_sphere_surface_r
from ..specfun import QuadratureSpec, ellipk, integrate_adaptive

# kernel rows carry integrable log singularities where the adaptive
# subdivision plateaus near 1e-7 absolute; that is far below the solver's
# discretization error, so accept it rather than fail
_KERNEL_QUAD = QuadratureSpec(abs_tol=1e-7, rel_tol=1e-7, max_subdivisions=400)

__all__ = ["BemMesh", "BemResult", "bem_solve", "neumann_drop_quadrature",
           "neumann_relative_value", "solve_mixed_axisymmetric",
           "solve_mixed_collocation", "cap_integral_surface",
           "cap_integral_interior", "build_window_mesh"]


@dataclass(frozen=True)
class BemMesh:
    """Resolution of the per-window ring x sector discretization."""

    n_rings: int = 4
    n_sectors: int = 8

    def __post_init__(self):
        if self.n_rings < 2:
            raise ResolutionError("need at least 2 rings per window")
        if self.n_sectors < 4:
            raise ResolutionError("need at least 4 sectors per window")

    def refined(self) -> "BemMesh":
        return BemMesh(2 * self.n_rings, 2 * self.n_sectors)


@dataclass(frozen=True)
class BemResult:
    """Output of a boundary-integral solve."""

    kind: str                  # "neumann_quadrature" | "axisymmetric" | "collocation"
    drop: float                # u(x1) - u(x2) (pair) or u(x1) (mixed)
    u_influx: float
    ubar: float | None
    flux: FluxVector
    exit_residuals: np.ndarray  # u at absorbing centers (should be ~0)


@lru_cache(maxsize=8)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _gl_nodes(a: float, b: float, n: int):
    x, w = _leggauss(n)
    return a + 0.5 * (b - a) * (x + 1.0), 0.5 * (b - a) * w


def _graded_gl(f, a: float, b: float, s: float, n: int = 48, power: int = 4):
    """Integrate a vectorized f over [a, b] with a log singularity at s in (a, b).

    Each side panel is mapped by u -> s + (end - s) u^power, whose
    Jacobian u^(power-1) tames log|tau - s| for Gauss nodes.
    """
    un, uw = _gl_nodes(0.0, 1.0, n)
    total = 0.0
    for end, sgn in ((a, -1.0), (b, 1.0)):
        L = end - s
        if abs(L) < 1e-15:
            continue
        tau = s + L * un ** power
        jac = power * L * un ** (power - 1)
        total += sgn * np.sum(f(tau) * jac * uw)
    return float(total)


def _frame(c: np.ndarray):
    """Orthonormal tangent frame (e1, e2) at a unit vector c."""
    ref = np.array([1.0, 0.0, 0.0])
    if abs(c[0]) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(c, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)
    return e1, e2


def _cap_points(c: np.ndarray, theta, phi):
    """Sphere points at colatitude theta around c, azimuth phi in c's frame."""
    e1, e2 = _frame(c)
    theta = np.asarray(theta)
    phi = np.asarray(phi)
    return (np.cos(theta)[..., None] * c
            + np.sin(theta)[..., None] * (np.cos(phi)[..., None] * e1
                                          + np.sin(phi)[..., None] * e2))


def _azimuthal_kernel(theta, alpha):
    """Azimuthal integral of the surface Green's function.

    P(theta) = int_0^{2pi} G(d(phi)) dphi for two boundary points at
    colatitudes theta and alpha in a common frame, with squared chord
    distance d^2 = A - B cos(phi).  The Coulomb part reduces to a
    complete elliptic integral, the log part splits into a closed form
    plus a smooth remainder.
    """
    theta = np.asarray(theta, dtype=float)
    A = 2.0 - 2.0 * np.cos(alpha) * np.cos(theta)
    B = 2.0 * np.sin(alpha) * np.sin(theta)
    apb = A + B
    k2 = np.clip(2.0 * B / np.where(apb > 0, apb, 1.0), 0.0, 1.0 - 1e-15)
    coulomb = np.where(apb > 0,
                       4.0 * ellipk(np.sqrt(k2)) / np.sqrt(np.where(apb > 0, apb, 1.0)),
                       0.0)
    disc = np.sqrt(np.maximum(A * A - B * B, 0.0))
    log_closed = np.pi * np.log(np.maximum(0.5 * (A + disc), 1e-300))
    # smooth remainder: int log(1 + d/2) dphi, even in phi
    pnod, pw = _gl_nodes(0.0, np.pi, 24)
    d = np.sqrt(np.maximum(A[..., None] - B[..., None] * np.cos(pnod), 0.0))
    log_smooth = 2.0 * np.sum(np.log1p(0.5 * d) * pw, axis=-1)
    return (coulomb / (2.0 * np.pi)
            - (log_closed + log_smooth) / (4.0 * np.pi)
            + 2.0 * np.pi * SPHERE_REGULAR_PART)


def cap_integral_surface(center: np.ndarray, eps: float, y: np.ndarray) -> float:
    """int_{cap} G(x; y) dA over the chord-radius-eps cap, y on the sphere."""
    center = np.asarray(center, dtype=float)
    y = np.asarray(y, dtype=float)
    chord = np.linalg.norm(y - center)
    if chord < 1e-12:
        # axisymmetric self integral; 2 pi rho G(rho) is smooth apart from rho log rho
        def self_integrand(rho):
            return 1.0 - 0.5 * rho * np.log(0.5 * rho * rho + rho) \
                + 2.0 * np.pi * SPHERE_REGULAR_PART * rho
        return integrate_adaptive(self_integrand, 0.0, eps)
    alpha = 2.0 * np.arcsin(min(chord / 2.0, 1.0))

    def radial(rho):
        theta = 2.0 * np.arcsin(rho / 2.0)
        return _azimuthal_kernel(theta, alpha) * rho

    if chord <= 1.5 * eps:
        # evaluation point on or near the cap: kernel has a log line at rho = chord
        if 0.0 < chord < eps:
            return _graded_gl(radial, 0.0, eps, chord)
        return _graded_gl(radial, 0.0, eps, min(chord, eps))
    nodes, w = _gl_nodes(0.0, eps, 48)
    return float(np.sum(radial(nodes) * w))


def cap_integral_interior(center: np.ndarray, eps: float, p: np.ndarray) -> float:
    """int_{cap} G(p; x) dA for an interior evaluation point p (smooth kernel)."""
    center = np.asarray(center, dtype=float)
    p = np.asarray(p, dtype=float)
    rnod, rw = _gl_nodes(0.0, eps, 32)
    pnod, pw = _gl_nodes(0.0, 2.0 * np.pi, 32)
    theta = 2.0 * np.arcsin(rnod / 2.0)
    total = 0.0
    for th, rho, wr in zip(theta, rnod, rw):
        pts = _cap_points(center, np.full_like(pnod, th), pnod)
        vals = np.array([gs_sphere_interior(p, x) for x in pts])
        total += rho * wr * np.sum(vals * pw)
    return total


def neumann_relative_value(cfg: ValidatedConfig, point: np.ndarray,
                           interior: bool = False) -> float:
    """u(point) - ubar for an influx/outflux pair, by exact-identity quadrature."""
    if not cfg.is_neumann_pair():
        raise DomainError("requires an influx/outflux pair configuration")
    c1, c2 = cfg.windows[0].center, cfg.windows[1].center
    eps = cfg.eps
    integral = cap_integral_interior if interior else cap_integral_surface
    return integral(c1, eps, point) - integral(c2, eps, point)


def neumann_drop_quadrature(cfg: ValidatedConfig) -> BemResult:
    """Drop u(x1) - u(x2) for the influx/outflux pair (prescribed fluxes)."""
    c1, c2 = cfg.windows[0].center, cfg.windows[1].center
    u1 = neumann_relative_value(cfg, c1)
    u2 = neumann_relative_value(cfg, c2)
    eps = cfg.eps
    flux = FluxVector(np.array([-0.5 * eps]), eps)  # prescribed outflux -pi eps^2
    return BemResult(kind="neumann_quadrature", drop=u1 - u2, u_influx=u1,
                     ubar=0.0, flux=flux, exit_residuals=np.array([u2]))


# ---------------------------------------------------------------------------
# axisymmetric mixed solver (influx and absorbing windows at antipodes)


def _chebyshev_radial(k: int, tau):
    """T_k(2 (rho/eps)^2 - 1) expressed through tau with rho = eps sin(tau)."""
    return np.cos(k * np.arccos(np.clip(-np.cos(2.0 * np.asarray(tau)), -1.0, 1.0)))


def solve_mixed_axisymmetric(cfg: ValidatedConfig, n_modes: int = 10):
    """Collocation solve of the antipodal influx/absorbing pair.

    The absorbing-window flux density is written as a smooth radial
    polynomial times the inverse-square-root edge factor; collocation
    imposes u = 0 on the window.  Axisymmetry reduces every influence
    integral to one radial quadrature.
    """
    if not (cfg.is_mixed() and cfg.n_windows == 2):
        raise DomainError("axisymmetric solver requires one influx plus one "
                          "absorbing window")
    c1, c2 = cfg.windows[0].center, cfg.windows[1].center
    if np.linalg.norm(c1 + c2) > 1e-9:
        raise DomainError("axisymmetric solver requires antipodal windows")
    eps = cfg.eps
    theta_eps = 2.0 * np.arcsin(eps / 2.0)

    # collocation colatitudes in the absorbing-cap frame (Chebyshev-like in tau)
    tau_c = (np.arange(n_modes) + 0.5) * (0.5 * np.pi) / n_modes
    theta_c = 2.0 * np.arcsin(eps * np.sin(tau_c) / 2.0)

    A = np.zeros((n_modes + 1, n_modes + 1))
    rhs = np.zeros(n_modes + 1)
    for i, (tc, thc) in enumerate(zip(tau_c, theta_c)):
        for k in range(n_modes):
            def integrand(tau, k=k, thc=thc):
                theta = 2.0 * np.arcsin(eps * np.sin(tau) / 2.0)
                return (_chebyshev_radial(k, tau)
                        * _azimuthal_kernel(theta, thc) * eps * np.sin(tau))
            A[i, k] = _graded_gl(integrand, 0.0, 0.5 * np.pi, tc)
        A[i, n_modes] = 1.0  # ubar
        y_i = _cap_points(c2, np.array([thc]), np.array([0.0]))[0]
        rhs[i] = -cap_integral_surface(c1, eps, y_i)
    # compatibility: total absorbed flux balances the influx
    tnod, tw = _gl_nodes(0.0, 0.5 * np.pi, 48)
    for k in range(n_modes):
        A[n_modes, k] = 2.0 * np.pi * eps * np.sum(_chebyshev_radial(k, tnod)
                                                   * np.sin(tnod) * tw)
    rhs[n_modes] = -np.pi * eps * eps
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularSystemError(f"collocation system condition {cond:.3e}")
    sol = np.linalg.solve(A, rhs)
    coeffs, ubar = sol[:n_modes], float(sol[n_modes])

    # u(x1): self-cap integral plus the density integral seen from the antipode
    self1 = cap_integral_surface(c1, eps, c1)
    dens = sum(coeffs[k] * _chebyshev_radial(k, tnod) for k in range(n_modes))
    theta_n = 2.0 * np.arcsin(eps * np.sin(tnod) / 2.0)
    cross = float(np.sum(dens * _azimuthal_kernel(theta_n, np.pi)
                         * eps * np.sin(tnod) * tw))
    u1 = ubar + self1 + cross
    flux = FluxVector(np.array([-0.5 * eps]), eps)

    # residual check at the absorbing-window center
    res = ubar + cap_integral_surface(c1, eps, c2) + float(
        np.sum(dens * _azimuthal_kernel(theta_n, 0.0) * eps * np.sin(tnod) * tw))
    return BemResult(kind="axisymmetric", drop=u1, u_influx=u1, ubar=ubar,
                     flux=flux, exit_residuals=np.array([res]))


# ---------------------------------------------------------------------------
# general ring x sector collocation


def build_window_mesh(center: np.ndarray, eps: float, mesh: BemMesh):
    """Element table for one window: tau/phi bounds, centroids, areas, weights.

    Rings are uniform in cos(tau) (rho = eps sin(tau)), which makes every
    element carry the same edge-weighted area 2 pi eps / (n_rings n_sectors);
    geometric element areas still sum to pi eps^2 exactly.
    """
    nr, ns = mesh.n_rings, mesh.n_sectors
    cos_tau = 1.0 - np.arange(nr + 1) / nr
    tau_edges = np.arccos(np.clip(cos_tau, 0.0, 1.0))
    phi_edges = np.linspace(0.0, 2.0 * np.pi, ns + 1)
    elements = []
    for i in range(nr):
        t0, t1 = tau_edges[i], tau_edges[i + 1]
        tmid = np.arccos(np.clip(1.0 - (i + 0.5) / nr, 0.0, 1.0))
        rho0, rho1 = eps * np.sin(t0), eps * np.sin(t1)
        area = 0.5 * (rho1 ** 2 - rho0 ** 2) * (2.0 * np.pi / ns)
        for s in range(ns):
            p0, p1 = phi_edges[s], phi_edges[s + 1]
            elements.append({
                "tau": (t0, t1), "phi": (p0, p1),
                "tau_mid": tmid, "phi_mid": 0.5 * (p0 + p1),
                "area": area,
                "weight": 2.0 * np.pi * eps / (nr * ns),
            })
    return elements


def _ring_grid(mesh: BemMesh):
    """Ring edges and midpoints in tau (rho = eps sin(tau)), uniform in cos(tau)."""
    nr = mesh.n_rings
    tau_edges = np.arccos(np.clip(1.0 - np.arange(nr + 1) / nr, 0.0, 1.0))
    tau_mid = np.arccos(np.clip(1.0 - (np.arange(nr) + 0.5) / nr, 0.0, 1.0))
    return tau_edges, tau_mid


def _same_window_ring(eps, t0, t1, theta_obs, tau_sing=None):
    """Edge-weighted ring influence observed on the same window (axisymmetric)."""
    def f(tau):
        theta = 2.0 * np.arcsin(eps * np.sin(tau) / 2.0)
        return _azimuthal_kernel(theta, theta_obs) * eps * np.sin(tau)
    if tau_sing is not None and t0 < tau_sing < t1:
        return _graded_gl(f, t0, t1, tau_sing, n=32)
    nodes, w = _gl_nodes(t0, t1, 32)
    return float(np.sum(f(nodes) * w))


def _ring_influence_at_points(src_center, eps, t0, t1, ys, nt=6, nphi=16):
    """Edge-weighted ring influence at observation points off the source window."""
    tnod, tw = _gl_nodes(t0, t1, nt)
    pnod, pw = _gl_nodes(0.0, 2.0 * np.pi, nphi)
    theta = 2.0 * np.arcsin(eps * np.sin(tnod) / 2.0)
    xs = _cap_points(src_center, *np.meshgrid(theta, pnod, indexing="ij"))
    ys = np.atleast_2d(ys)
    d = np.linalg.norm(xs[None, :, :, :] - ys[:, None, None, :], axis=-1)
    vals = gs_sphere_surface_r(np.maximum(d, 1e-14))
    jac = (eps * np.sin(tnod) * tw)[:, None] * pw[None, :]
    return vals.reshape(ys.shape[0], -1) @ jac.ravel()


def solve_mixed_collocation(cfg: ValidatedConfig, mesh: BemMesh | None = None):
    """Ring-collocation solve for a general mixed configuration.

    Each absorbing window carries an edge-weighted density modulated per
    ring; the zero-concentration condition is enforced in azimuth-averaged
    form on each ring, which keeps every same-window influence a sharp 1D
    radial quadrature and every cross-window influence smooth.
    """
    if not cfg.is_mixed():
        raise DomainError("collocation solver requires a mixed configuration")
    mesh = mesh or BemMesh()
    eps = cfg.eps
    c1 = cfg.windows[0].center
    exits = cfg.windows[1:]
    nw, nr = len(exits), mesh.n_rings
    tau_edges, tau_mid = _ring_grid(mesh)
    theta_mid = 2.0 * np.arcsin(eps * np.sin(tau_mid) / 2.0)
    ring_weight = 2.0 * np.pi * eps / nr
    n = nw * nr

    phi_obs, wphi_obs = _gl_nodes(0.0, 2.0 * np.pi, 12)
    obs_points = {}
    for wi, w in enumerate(exits):
        for i in range(nr):
            obs_points[wi, i] = _cap_points(
                w.center, np.full_like(phi_obs, theta_mid[i]), phi_obs)

    A = np.zeros((n + 1, n + 1))
    rhs = np.zeros(n + 1)
    for wi in range(nw):
        for i in range(nr):
            row = wi * nr + i
            for wj in range(nw):
                for j in range(nr):
                    col = wj * nr + j
                    t0, t1 = tau_edges[j], tau_edges[j + 1]
                    if wi == wj:
                        A[row, col] = _same_window_ring(
                            eps, t0, t1, theta_mid[i],
                            tau_sing=tau_mid[i] if i == j else None)
                    else:
                        vals = _ring_influence_at_points(
                            exits[wj].center, eps, t0, t1, obs_points[wi, i])
                        A[row, col] = float(vals @ wphi_obs) / (2.0 * np.pi)
            A[row, n] = 1.0
            infl = [cap_integral_surface(c1, eps, y) for y in obs_points[wi, i]]
            rhs[row] = -float(np.asarray(infl) @ wphi_obs) / (2.0 * np.pi)
    A[n, :n] = ring_weight
    rhs[n] = -np.pi * eps * eps
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularSystemError(f"collocation system condition {cond:.3e}")
    sol = np.linalg.solve(A, rhs)
    c, ubar = sol[:n], float(sol[n])

    u1 = ubar + cap_integral_surface(c1, eps, c1)
    for wj in range(nw):
        for j in range(nr):
            t0, t1 = tau_edges[j], tau_edges[j + 1]
            u1 += c[wj * nr + j] * float(_ring_influence_at_points(
                exits[wj].center, eps, t0, t1, c1)[0])

    fluxes = np.array([np.sum(c[wi * nr:(wi + 1) * nr]) * ring_weight
                       for wi in range(nw)])
    residuals = np.empty(nw)
    for wi, w in enumerate(exits):
        val = ubar + cap_integral_surface(c1, eps, w.center)
        for wj in range(nw):
            for j in range(nr):
                t0, t1 = tau_edges[j], tau_edges[j + 1]
                if wj == wi:
                    val += c[wj * nr + j] * _same_window_ring(eps, t0, t1, 0.0)
                else:
                    val += c[wj * nr + j] * float(_ring_influence_at_points(
                        exits[wj].center, eps, t0, t1, w.center)[0])
        residuals[wi] = val
    return BemResult(kind="collocation", drop=u1, u_influx=u1, ubar=ubar,
                     flux=FluxVector(fluxes / (2.0 * np.pi * eps), eps),
                     exit_residuals=residuals)


def bem_solve(cfg: ValidatedConfig, mesh: BemMesh | None = None,
              richardson: bool = False, force_general: bool = False) -> BemResult:
    """Dispatching entry point for the boundary-integral oracle.

    Influx/outflux pairs are evaluated by direct quadrature of the exact
    identity, antipodal mixed pairs by the axisymmetric collocation, and
    everything else by the general ring x sector collocation.  With
    ``richardson`` the general solver runs two mesh levels and
    extrapolates the drop.
    """
    if not isinstance(cfg.domain, Sphere) or cfg.domain.radius != 1.0:
        raise DomainError("boundary-integral oracle requires the unit sphere")
    if cfg.is_neumann_pair():
        return neumann_drop_quadrature(cfg)
    if not cfg.is_mixed():
        raise DomainError("unsupported window role combination")
    antipodal = (cfg.n_windows == 2
                 and np.linalg.norm(cfg.windows[0].center
                                    + cfg.windows[1].center) < 1e-9)
    if antipodal and not force_general:
        return solve_mixed_axisymmetric(cfg)
    mesh = mesh or BemMesh()
    res = solve_mixed_collocation(cfg, mesh)
    if not richardson:
        return res
    fine = solve_mixed_collocation(cfg, mesh.refined())
    drop = fine.drop + (fine.drop - res.drop)
    return BemResult(kind="collocation", drop=drop, u_influx=drop,
                     ubar=fine.ubar, flux=fine.flux,
                     exit_residuals=fine.exit_residuals)
