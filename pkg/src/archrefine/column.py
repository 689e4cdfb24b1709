"""Doric shaft geometry: entasis profile, flute law and fluted surface."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh

PENROSE_COEFFS = (0.954753, -0.0152412, -0.000716763)
# a parabola's chord deviation peaks at mid-height; 5.02 m puts h at 10.04 m
DEFAULT_HEIGHT = 10.04
DEFAULT_ALPHA = 6.4
DEFAULT_BETA = 2.25
DEFAULT_FLUTES = 20


class ColumnError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnProfile:
    """Shaft radius ``r(z) = c0 + c1 z + c2 z**2`` on ``[0, h]``."""

    c0: float
    c1: float
    c2: float
    h: float = DEFAULT_HEIGHT

    def __post_init__(self):
        if not self.h > 0:
            raise ColumnError("shaft height must be positive")
        zs = np.linspace(0.0, self.h, 257)
        if np.any(self.radius(zs) <= 0):
            raise ColumnError("radius must stay positive over the shaft")

    def radius(self, z):
        z = np.asarray(z, dtype=float)
        return self.c0 + z * (self.c1 + z * self.c2)

    def chord(self) -> "ColumnProfile":
        """Straight taper joining ``r(0)`` and ``r(h)``."""
        top = float(self.radius(self.h))
        return ColumnProfile(self.c0, (top - self.c0) / self.h, 0.0, self.h)

    def is_tapering(self) -> bool:
        zs = np.linspace(0.0, self.h, 1025)
        return bool(np.all(np.diff(self.radius(zs)) < 0))


def penrose(h: float = DEFAULT_HEIGHT) -> ColumnProfile:
    return ColumnProfile(*PENROSE_COEFFS, h=h)


def _check_z(profile: ColumnProfile, z):
    z = np.asarray(z, dtype=float)
    if np.any(z < -1e-12) or np.any(z > profile.h + 1e-12):
        raise ColumnError(f"z outside the shaft [0, {profile.h}]")
    return z


def radius_at(profile: ColumnProfile, z):
    return profile.radius(_check_z(profile, z))


def entasis_deviation(profile: ColumnProfile) -> tuple[float, float]:
    """``(z_star, delta)``: where and by how much the profile bulges past its chord.

    ``r - chord = -c2 z (h - z)`` peaks at mid-height.  Positive delta is an
    outward swelling; a convex (``c2 > 0``) profile gives a negative value.
    """
    h = profile.h
    return h / 2.0, -profile.c2 * h * h / 4.0


@dataclass(frozen=True)
class FluteSpec:
    """Power-law flute ``(1 + alpha |t|**beta) / norm`` over one flute width.

    By default ``norm`` is taken at the half-width ``pi / n_flutes`` so that the
    arrises sit exactly on the profile radius.  ``full_width_norm`` uses the full
    flute pitch ``2 pi / n_flutes`` instead, matching the printed constant,
    which leaves the arris at ``f < 1``.
    """

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    n_flutes: int = DEFAULT_FLUTES
    full_width_norm: bool = False

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ColumnError("alpha and beta must be positive")
        if int(self.n_flutes) != self.n_flutes or self.n_flutes < 1:
            raise ColumnError("n_flutes must be a positive integer")

    @property
    def pitch(self) -> float:
        return 2.0 * math.pi / self.n_flutes

    @property
    def half_width(self) -> float:
        return math.pi / self.n_flutes

    def unit(self, theta):
        """Periodised flute law; ``theta = 0`` is a groove centre."""
        theta = np.asarray(theta, dtype=float)
        t = theta - self.pitch * np.round(theta / self.pitch)
        ref = self.pitch if self.full_width_norm else self.half_width
        return (1.0 + self.alpha * np.abs(t) ** self.beta) / (1.0 + self.alpha * ref**self.beta)

    def ridge_angles(self) -> np.ndarray:
        k = np.arange(self.n_flutes)
        return -math.pi + self.half_width + k * self.pitch


@dataclass(frozen=True)
class ColumnSurface:
    profile: ColumnProfile
    flutes: FluteSpec | None = None

    def radius(self, theta, z):
        r = radius_at(self.profile, z)
        if self.flutes is None:
            return r * np.ones_like(np.asarray(theta, dtype=float))
        return r * self.flutes.unit(theta)


def flute_radius(surface: ColumnSurface, theta, z):
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > math.pi + 1e-12):
        raise ColumnError("theta must lie in [-pi, pi]")
    return surface.radius(theta, z)


def column_mesh(surface: ColumnSurface, n_theta: int, n_z: int) -> Mesh:
    """Triangulated shaft with ``n_theta * n_z`` vertices.

    The angular grid starts on an arris, so when ``n_theta`` is a multiple of
    the flute count every arris line is sampled exactly.
    """
    if n_z < 2:
        raise ColumnError("n_z must be at least 2")
    if surface.flutes is not None:
        need = 3 * surface.flutes.n_flutes
        start = -math.pi + surface.flutes.half_width
    else:
        need = 3
        start = -math.pi
    if n_theta < need:
        raise ColumnError(f"n_theta={n_theta} cannot resolve the flutes; use at least {need}")
    theta = start + 2.0 * math.pi * np.arange(n_theta) / n_theta
    zs = np.linspace(0.0, surface.profile.h, n_z)
    T, Z = np.meshgrid(theta, zs)
    R = surface.radius(T, Z)
    verts = np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel(), Z.ravel()], axis=1)

    idx = np.arange(n_theta * n_z).reshape(n_z, n_theta)
    nxt = np.roll(idx, -1, axis=1)
    a, b = idx[:-1].ravel(), nxt[:-1].ravel()
    c, d = nxt[1:].ravel(), idx[1:].ravel()
    faces = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    return Mesh(verts, faces)
