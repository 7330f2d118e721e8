"""Brownian Monte Carlo estimate of exit-flux splitting in the unit ball.

Particles launch uniformly over the influx cap, take Gaussian steps of
variance 2 dt per coordinate, reflect specularly off the sphere, and
are absorbed when their boundary crossing point lands inside an
absorbing cap.  The absorbed fractions estimate the exit-flux split.

Particles are processed in fixed-size chunks with per-chunk RNG streams
spawned from the master seed, so results are bit-reproducible for a
given (master_seed, n_particles) regardless of worker count.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, TimeoutWarning
from ..geometry import Sphere, ValidatedConfig

__all__ = ["McConfig", "McResult", "mc_flux_split"]

_CHUNK = 25_000


@dataclass(frozen=True)
class McConfig:
    """Particle count, time step and budgets for the flux-split simulation.

    ``dt`` defaults to eps^2 / 20 at run time; values above eps^2 / 10
    are rejected.
    """

    n_particles: int = 100_000
    dt: float | None = None
    master_seed: int = 0
    max_steps: int = 400_000
    debug_checks: bool = False

    def __post_init__(self):
        if self.n_particles < 1:
            raise DomainError("n_particles must be positive")
        if self.dt is not None and self.dt <= 0:
            raise DomainError("dt must be positive")


@dataclass(frozen=True)
class McResult:
    p: np.ndarray           # absorbed fraction per exit window (sums to 1)
    stderr: np.ndarray      # binomial standard errors
    counts: np.ndarray
    n_absorbed: int
    n_timeout: int
    dt: float

    @property
    def split_ratio(self) -> float:
        """p[0] / p[1] for two-exit configurations."""
        return float(self.p[0] / self.p[1])


def _run_chunk(n: int, seed_seq: np.random.SeedSequence, centers, radii_chord,
               influx_center, eps: float, dt: float, max_steps: int,
               debug: bool):
    rng = np.random.default_rng(seed_seq)
    n_exit = centers.shape[0]

    # uniform start over the influx cap: chord radius sqrt-uniform, area
    # element of a cap is exactly rho drho dphi in the chord radius
    rho = eps * np.sqrt(rng.random(n))
    phi = 2.0 * np.pi * rng.random(n)
    theta = 2.0 * np.arcsin(rho / 2.0)
    ref = np.array([1.0, 0.0, 0.0]) if abs(influx_center[0]) <= 0.9 \
        else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(influx_center, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(influx_center, e1)
    pos = (np.cos(theta)[:, None] * influx_center
           + np.sin(theta)[:, None] * (np.cos(phi)[:, None] * e1
                                       + np.sin(phi)[:, None] * e2))

    counts = np.zeros(n_exit, dtype=np.int64)
    sigma_base = np.sqrt(2.0 * dt)
    near_lateral = 2.5 * eps
    alive = pos
    steps = 0
    while alive.shape[0] and steps < max_steps:
        steps += 1
        r = np.sqrt(np.einsum("ij,ij->i", alive, alive))
        depth = 1.0 - r
        proj = alive / r[:, None]
        # splitting fractions carry no time marginal, so the step size may
        # vary per particle: deep particles take one exact Gaussian leap
        # sized so reaching the boundary within it is a > 5.5 sigma event,
        # while particles hovering over an absorbing cap are refined below
        # the configured dt to keep the absorption test sharp
        sigma = np.maximum(sigma_base, depth / 5.5)
        shell = depth < 4.5 * sigma_base
        if np.any(shell):
            near = np.zeros(alive.shape[0], dtype=bool)
            for j in range(n_exit):
                dj2 = np.einsum("ij,ij->i", proj - centers[j], proj - centers[j])
                near |= shell & (dj2 <= near_lateral ** 2)
            sigma[near] = 0.25 * sigma_base
        dt_i = 0.5 * sigma * sigma

        new = alive + sigma[:, None] * rng.standard_normal(alive.shape)
        r2 = np.einsum("ij,ij->i", new, new)
        out = r2 > 1.0
        absorbed_full = np.full(alive.shape[0], -1, dtype=np.int64)

        if np.any(out):
            old = alive[out]
            stepv = new[out] - old
            # crossing point: |old + t step| = 1, t in (0, 1]
            a = np.einsum("ij,ij->i", stepv, stepv)
            b = np.einsum("ij,ij->i", old, stepv)
            c = np.einsum("ij,ij->i", old, old) - 1.0
            disc = np.sqrt(np.maximum(b * b - a * c, 0.0))
            t = (-b + disc) / np.maximum(a, 1e-300)
            q = old + t[:, None] * stepv
            q /= np.linalg.norm(q, axis=1)[:, None]

            absorbed = np.full(q.shape[0], -1, dtype=np.int64)
            for j in range(n_exit):
                hit = (absorbed < 0) & (
                    np.einsum("ij,ij->i", q - centers[j], q - centers[j])
                    <= radii_chord[j] ** 2)
                absorbed[hit] = j
            absorbed_full[out] = absorbed

            # specular reflection of the overshoot for survivors
            surv = absorbed < 0
            if np.any(surv):
                qs = q[surv]
                ns = new[out][surv]
                refl = ns - 2.0 * np.einsum("ij,ij->i", ns - qs, qs)[:, None] * qs
                rr = np.linalg.norm(refl, axis=1)
                far = rr > 1.0
                if np.any(far):
                    # rare double overshoot: radial mirror as fallback
                    refl[far] *= ((2.0 - rr[far]) / rr[far])[:, None]
                if debug:
                    assert np.all(np.linalg.norm(refl, axis=1) <= 1.0 + 1e-12)
                upd = new[out]
                upd[surv] = refl
                new[out] = upd

        # Brownian-bridge absorption for segments that stayed inside but
        # passed over an absorbing cap: a bridge with endpoint heights
        # h0, h1 touches the boundary with probability exp(-h0 h1 / dt)
        inside = ~out
        if np.any(inside):
            h0 = depth[inside]
            newin = new[inside]
            rn = np.sqrt(np.einsum("ij,ij->i", newin, newin))
            h1 = np.maximum(1.0 - rn, 0.0)
            pj0 = proj[inside]
            pj1 = newin / np.maximum(rn, 1e-300)[:, None]
            expo = h0 * h1 / dt_i[inside]
            cand_any = expo < 20.0
            if np.any(cand_any):
                abs_in = np.full(newin.shape[0], -1, dtype=np.int64)
                touch = cand_any & (rng.random(newin.shape[0])
                                    < np.exp(-np.minimum(expo, 50.0)))
                for j in range(n_exit):
                    in0 = np.einsum("ij,ij->i", pj0 - centers[j],
                                    pj0 - centers[j]) <= radii_chord[j] ** 2
                    in1 = np.einsum("ij,ij->i", pj1 - centers[j],
                                    pj1 - centers[j]) <= radii_chord[j] ** 2
                    hit = (abs_in < 0) & touch & in0 & in1
                    abs_in[hit] = j
                absorbed_full[inside] = abs_in

        for j in range(n_exit):
            counts[j] += int(np.sum(absorbed_full == j))
        alive = new[absorbed_full < 0]
    return counts, alive.shape[0]


def mc_flux_split(cfg: ValidatedConfig, mc: McConfig | None = None) -> McResult:
    """Absorbed-fraction split over the exit windows of a mixed configuration."""
    if not isinstance(cfg.domain, Sphere) or cfg.domain.radius != 1.0:
        raise DomainError("Monte Carlo oracle requires the unit sphere")
    if not cfg.is_mixed():
        raise DomainError("Monte Carlo oracle requires a mixed configuration")
    mc = mc or McConfig()
    eps = cfg.eps
    dt = mc.dt if mc.dt is not None else eps * eps / 20.0
    if dt > eps * eps / 10.0 + 1e-15:
        raise DomainError("dt must not exceed eps^2 / 10")

    centers = np.array([w.center for w in cfg.windows[1:]])
    radii = np.array([w.radius for w in cfg.windows[1:]])
    influx_center = cfg.windows[0].center

    n = mc.n_particles
    chunks = [(i, min(_CHUNK, n - i * _CHUNK))
              for i in range((n + _CHUNK - 1) // _CHUNK)]
    seqs = {idx: np.random.SeedSequence(entropy=mc.master_seed, spawn_key=(idx,))
            for idx, _ in chunks}

    def work(item):
        idx, size = item
        return _run_chunk(size, seqs[idx], centers, radii, influx_center,
                          eps, dt, mc.max_steps, mc.debug_checks)

    workers = int(os.environ.get("NARROWFLUX_THREADS", "1") or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(ch) for ch in chunks]

    counts = np.sum([r[0] for r in results], axis=0)
    n_timeout = int(np.sum([r[1] for r in results]))
    n_absorbed = int(np.sum(counts))
    if n_absorbed == 0:
        raise DomainError("no particles absorbed; increase max_steps")
    if n_timeout > 0.01 * n:
        warnings.warn(f"{n_timeout} of {n} particles hit the step budget",
                      TimeoutWarning, stacklevel=2)
    p = counts / n_absorbed
    stderr = np.sqrt(np.maximum(p * (1.0 - p), 0.0) / n_absorbed)
    return McResult(p=p, stderr=stderr, counts=counts, n_absorbed=n_absorbed,
                    n_timeout=n_timeout, dt=dt)
