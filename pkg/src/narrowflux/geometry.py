"""Problem-instance definition: domains, windows, validation, scaling.

A configuration is a domain (unit sphere, sphere of radius R, or the
half-space z >= 0) plus a list of circular windows of common style:
one influx window and one or more exits (prescribed-outflux or
absorbing).  All distances are Euclidean chord distances; on the unit
sphere a window of radius ``eps`` is the cap of chord radius ``eps``
around its center, which has area exactly pi*eps^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, OverlapError, RoleError

__all__ = [
    "ROLE_INFLUX",
    "ROLE_OUTFLUX",
    "ROLE_ABSORBING",
    "UnitSphere",
    "Sphere",
    "HalfSpace",
    "WindowSpec",
    "WindowConfig",
    "ValidatedConfig",
    "DistanceMatrix",
    "validate_config",
    "nondimensionalize",
    "config_from_dict",
    "config_to_dict",
    "load_config",
]

ROLE_INFLUX = "influx"
ROLE_OUTFLUX = "outflux_neumann"
ROLE_ABSORBING = "absorbing"
_ROLES = (ROLE_INFLUX, ROLE_OUTFLUX, ROLE_ABSORBING)

_UNIT_NORM_TOL = 1e-8  # centers further off the surface than this are rejected


@dataclass(frozen=True)
class Sphere:
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("sphere radius must be positive")

    @property
    def kind(self) -> str:
        return "sphere"


def UnitSphere() -> Sphere:
    return Sphere(1.0)


@dataclass(frozen=True)
class HalfSpace:
    @property
    def kind(self) -> str:
        return "half_space"


@dataclass
class WindowSpec:
    """One circular window: center, radius and boundary-condition role.

    ``center`` is a unit 3-vector for sphere domains (a (colatitude,
    azimuth) pair is also accepted and converted) or an (x, y) point in
    the z = 0 plane for the half-space.
    """

    center: np.ndarray
    radius: float
    role: str

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if self.role not in _ROLES:
            raise RoleError(f"unknown window role {self.role!r}")
        if self.radius <= 0:
            raise DomainError("window radius must be positive")


def window_from_angles(colatitude: float, azimuth: float, radius: float,
                       role: str) -> WindowSpec:
    """Sphere window specified by (colatitude, azimuth) in radians."""
    st, ct = np.sin(colatitude), np.cos(colatitude)
    center = np.array([st * np.cos(azimuth), st * np.sin(azimuth), ct])
    return WindowSpec(center=center, radius=radius, role=role)


@dataclass
class WindowConfig:
    """Unvalidated problem instance; run :func:`validate_config` before use."""

    domain: Sphere | HalfSpace
    windows: list[WindowSpec]
    current: float = 1.0
    diffusion: float = 1.0


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of pairwise chord distances between window centers."""

    l: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.l, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError("distance matrix must be square")
        if not np.allclose(arr, arr.T, atol=1e-12):
            raise DomainError("distance matrix must be symmetric")
        if np.any(np.abs(np.diag(arr)) > 1e-12):
            raise DomainError("distance matrix diagonal must be zero")
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        object.__setattr__(self, "l", arr)

    @property
    def n(self) -> int:
        return self.l.shape[0]

    def __getitem__(self, ij):
        return self.l[ij]


@dataclass(frozen=True)
class ValidatedConfig:
    """Validated instance: normalized centers, influx first, distances attached."""

    domain: Sphere | HalfSpace
    windows: tuple[WindowSpec, ...]
    current: float
    diffusion: float
    distances: DistanceMatrix

    @property
    def n_windows(self) -> int:
        return len(self.windows)

    @property
    def eps(self) -> float:
        return self.windows[0].radius

    @property
    def roles(self) -> tuple[str, ...]:
        return tuple(w.role for w in self.windows)

    @property
    def centers(self) -> np.ndarray:
        return np.array([w.center for w in self.windows])

    def is_mixed(self) -> bool:
        return all(w.role == ROLE_ABSORBING for w in self.windows[1:])

    def is_neumann_pair(self) -> bool:
        return (self.n_windows == 2 and self.windows[1].role == ROLE_OUTFLUX)


def _as_surface_point(domain, center: np.ndarray) -> np.ndarray:
    center = np.asarray(center, dtype=float)
    if isinstance(domain, HalfSpace):
        if center.shape == (3,):
            if abs(center[2]) > 1e-12:
                raise DomainError("half-space window centers must lie in z = 0")
            center = center[:2]
        if center.shape != (2,):
            raise DomainError("half-space centers are 2-vectors in the plane")
        return center.copy()
    if center.shape == (2,):
        # (colatitude, azimuth) shorthand
        return window_from_angles(center[0], center[1], 1.0, ROLE_INFLUX).center
    if center.shape != (3,):
        raise DomainError("sphere centers are unit 3-vectors or angle pairs")
    norm = np.linalg.norm(center)
    if abs(norm - 1.0) > _UNIT_NORM_TOL:
        raise DomainError(f"sphere window center has norm {norm:.3e}, not 1")
    return center / norm


def validate_config(cfg: WindowConfig, allow_close: bool = False) -> ValidatedConfig:
    """Normalize centers, check roles and overlaps, compute chord distances.

    ``allow_close`` relaxes the separation requirement from one diameter
    per pair down to exact tangency (l = 2*eps), for the close-window
    expansion.
    """
    if not cfg.windows:
        raise RoleError("configuration has no windows")
    windows = []
    for w in cfg.windows:
        center = _as_surface_point(cfg.domain, w.center)
        radius = w.radius
        if isinstance(cfg.domain, Sphere):
            if radius >= cfg.domain.radius:
                raise DomainError("window radius must be below the sphere radius")
        windows.append(WindowSpec(center=center, radius=radius, role=w.role))

    influx = [i for i, w in enumerate(windows) if w.role == ROLE_INFLUX]
    if len(influx) == 0:
        raise RoleError("configuration needs exactly one influx window")
    if len(influx) > 1:
        raise RoleError("multiple influx windows are not supported")
    if len(windows) < 2:
        raise RoleError("configuration needs at least one exit window")
    # influx first; exits keep their relative order
    order = influx + [i for i in range(len(windows)) if i not in influx]
    windows = [windows[i] for i in order]

    centers = np.array([w.center for w in windows])
    diff = centers[:, None, :] - centers[None, :, :]
    l = np.sqrt(np.sum(diff * diff, axis=-1))
    radii = np.array([w.radius for w in windows])
    min_sep = radii[:, None] + radii[None, :]
    tol = 1e-12
    slack = 0.0 if allow_close else -tol
    iu = np.triu_indices(len(windows), k=1)
    bad = l[iu] < min_sep[iu] + slack - tol
    if np.any(bad):
        i, j = iu[0][bad][0], iu[1][bad][0]
        raise OverlapError(
            f"windows {i} and {j} overlap: separation {l[i, j]:.6g} < "
            f"{min_sep[i, j]:.6g}")

    for w in windows:
        w.center.flags.writeable = False
    return ValidatedConfig(domain=cfg.domain, windows=tuple(windows),
                           current=cfg.current, diffusion=cfg.diffusion,
                           distances=DistanceMatrix(l))


def nondimensionalize(cfg: ValidatedConfig) -> tuple[ValidatedConfig, float]:
    """Rescale a sphere configuration to the unit sphere.

    Lengths scale by 1/R and the returned factor I*R/D converts the
    dimensionless field u back to concentration, c = (I R / D) * u.
    """
    if not isinstance(cfg.domain, Sphere):
        raise DomainError("nondimensionalize requires a sphere domain")
    R = cfg.domain.radius
    scale = cfg.current * R / cfg.diffusion
    if R == 1.0:
        return cfg, scale
    windows = [WindowSpec(center=w.center.copy(), radius=w.radius / R, role=w.role)
               for w in cfg.windows]
    scaled = WindowConfig(domain=Sphere(1.0), windows=windows,
                          current=cfg.current, diffusion=cfg.diffusion)
    return validate_config(scaled), scale


# ---------------------------------------------------------------------------
# JSON configuration interface

_DOMAIN_TAGS = {"sphere": Sphere, "half_space": HalfSpace}


def config_from_dict(data: dict) -> WindowConfig:
    dom = data["domain"]
    kind = dom["type"]
    if kind == "sphere":
        domain = Sphere(float(dom.get("R", 1.0)))
    elif kind == "half_space":
        domain = HalfSpace()
    else:
        raise DomainError(f"unknown domain type {kind!r}")
    windows = [WindowSpec(center=np.asarray(w["center"], dtype=float),
                          radius=float(w["radius"]), role=w["role"])
               for w in data["windows"]]
    return WindowConfig(domain=domain, windows=windows,
                        current=float(data.get("current", 1.0)),
                        diffusion=float(data.get("diffusion", 1.0)))


def config_to_dict(cfg: WindowConfig | ValidatedConfig) -> dict:
    if isinstance(cfg.domain, Sphere):
        dom = {"type": "sphere", "R": cfg.domain.radius}
    else:
        dom = {"type": "half_space"}
    return {
        "domain": dom,
        "current": cfg.current,
        "diffusion": cfg.diffusion,
        "windows": [{"center": list(map(float, w.center)),
                     "radius": w.radius, "role": w.role}
                    for w in cfg.windows],
    }


def load_config(path) -> WindowConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))
