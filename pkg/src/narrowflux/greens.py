"""Neumann Green's functions for the unit sphere and the generic singular kernel.

The surface-to-surface kernel and its interior extension are closed
forms; the generic kernel ``1/(2 pi r) - H log(r)/(4 pi)`` carries the
Coulomb and curvature-log singularities shared by all smooth domains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SingularityError

__all__ = [
    "GreensSplit",
    "gs_sphere_surface",
    "gs_sphere_surface_r",
    "gs_sphere_interior",
    "greens_split_sphere",
    "general_singular",
    "SPHERE_REGULAR_PART",
    "SPHERE_MEAN_CURVATURE",
]

_MIN_SEPARATION = 1e-12

# regular part v = log(2)/(4 pi) - 9/(20 pi) and constant mean curvature H = 1
SPHERE_REGULAR_PART = float(np.log(2.0) / (4.0 * np.pi) - 9.0 / (20.0 * np.pi))
SPHERE_MEAN_CURVATURE = 1.0


@dataclass(frozen=True)
class GreensSplit:
    """Singular/regular decomposition G(r) ~ singular(r) + regular_at_center."""

    singular: Callable[[float], float]
    regular_at_center: float
    curvature: float


def general_singular(H: float, r):
    """Two-singularity kernel 1/(2 pi r) - H log(r)/(4 pi) for curvature H."""
    rarr = np.asarray(r, dtype=float)
    if np.any(rarr <= 0):
        raise DomainError("general_singular requires r > 0")
    out = 1.0 / (2.0 * np.pi * rarr) - H * np.log(rarr) / (4.0 * np.pi)
    return float(out) if np.isscalar(r) or rarr.ndim == 0 else out


def gs_sphere_surface_r(r):
    """Surface Green's function of the unit sphere as a function of chord distance.

    G(r) = 1/(2 pi r) - log(r^2/2 + r)/(4 pi) + log(2)/(4 pi) - 9/(20 pi).
    """
    rarr = np.asarray(r, dtype=float)
    if np.any(rarr < _MIN_SEPARATION):
        raise SingularityError("chord distance below 1e-12; use the split form")
    out = (1.0 / (2.0 * np.pi * rarr)
           - np.log(0.5 * rarr * rarr + rarr) / (4.0 * np.pi)
           + SPHERE_REGULAR_PART)
    return float(out) if np.isscalar(r) or rarr.ndim == 0 else out


def gs_sphere_surface(x, y) -> float:
    """Surface Green's function between two points on the unit sphere."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for p in (x, y):
        if abs(np.linalg.norm(p) - 1.0) > 1e-9:
            raise DomainError("gs_sphere_surface arguments must be unit vectors")
    return gs_sphere_surface_r(np.linalg.norm(x - y))


def gs_sphere_interior(x, y) -> float:
    """Green's function of the unit sphere, field point inside, pole on the surface.

    G(x; y) = 1/(2 pi |x-y|) + (|x|^2 + 1)/(8 pi)
              + log(2 / (1 - |x| cos(gamma) + |x-y|)) / (4 pi) - 7/(10 pi)
    with gamma the angle between x and y, |y| = 1 and |x| <= 1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(y) - 1.0) > 1e-9:
        raise DomainError("pole y must lie on the unit sphere")
    xn = np.linalg.norm(x)
    if xn > 1.0 + 1e-9:
        raise DomainError("field point x must lie in the closed unit ball")
    r = np.linalg.norm(x - y)
    if r < _MIN_SEPARATION:
        raise SingularityError("field point coincides with the pole")
    cosg = 1.0 if xn == 0.0 else float(np.clip(np.dot(x, y) / xn, -1.0, 1.0))
    # cos(gamma) enters as |x| cos(gamma); the x = 0 limit is benign
    return float(1.0 / (2.0 * np.pi * r)
                 + (xn * xn + 1.0) / (8.0 * np.pi)
                 + np.log(2.0 / (1.0 - xn * cosg + r)) / (4.0 * np.pi)
                 - 7.0 / (10.0 * np.pi))


def greens_split_sphere() -> GreensSplit:
    """Singular kernel, regular part and curvature for the unit sphere."""
    return GreensSplit(
        singular=lambda r: general_singular(SPHERE_MEAN_CURVATURE, r),
        regular_at_center=SPHERE_REGULAR_PART,
        curvature=SPHERE_MEAN_CURVATURE,
    )
