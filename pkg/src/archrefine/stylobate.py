"""Stylobate elevation field built from its four boundary arcs.

Coordinates: origin at the south-east corner, ``x`` runs north along the
east facade (``0..a``), ``y`` runs west along the south flank (``0..b``).
Sides are ``east: f(x, 0)``, ``west: f(x, b)``, ``south: f(0, y)`` and
``north: f(a, y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvefit import ParabolicArc
from .mesh import Mesh, grid_quads

WIDTH = 30.9
LENGTH = 69.5

# monomial order used for ``coeffs``: 1, x, y, x^2, y^2, xy, x^2 y, x y^2
MONOMIALS = ((0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1), (2, 1), (1, 2))
MONOMIAL_NAMES = ("1", "x", "y", "x^2", "y^2", "xy", "x^2y", "xy^2")

PARTHENON_COEFFS = tuple(
    1e-3 * c
    for c in (1.16078, 8.87918, 8.00577, -0.288568, -0.105338, -0.0523071, 0.000459584, 0.000413477)
)

SIDES = ("east", "west", "south", "north")
CORNER_TOL = 1e-6
DOMAIN_TOL = 1e-9


class StylobateError(ValueError):
    pass


class CornerMismatchError(StylobateError):
    def __init__(self, message: str, mismatches: dict):
        super().__init__(message)
        self.mismatches = mismatches


class CrownError(StylobateError):
    pass


@dataclass(frozen=True)
class BoundarySet:
    """Four boundary arcs; east/west are parameterised by x, south/north by y."""

    east: ParabolicArc
    west: ParabolicArc
    south: ParabolicArc
    north: ParabolicArc

    def corner_values(self) -> dict[str, tuple[float, float]]:
        """Each corner as seen from its two sides."""
        e, w, s, n = self.east, self.west, self.south, self.north
        return {
            "SE": (float(e(0.0)), float(s(0.0))),
            "NE": (float(e(e.length)), float(n(0.0))),
            "SW": (float(w(0.0)), float(s(s.length))),
            "NW": (float(w(w.length)), float(n(n.length))),
        }

    def corner_mismatch(self) -> dict[str, float]:
        return {k: abs(p - q) for k, (p, q) in self.corner_values().items()}

    def __add__(self, other: "BoundarySet") -> "BoundarySet":
        return BoundarySet(*(getattr(self, k) + getattr(other, k) for k in SIDES))


@dataclass(frozen=True)
class StylobateSurface:
    """``f(x, y) = sum coeffs[k] * x**i * y**j`` over ``MONOMIALS``."""

    coeffs: tuple[float, ...]
    a: float = WIDTH
    b: float = LENGTH

    def __post_init__(self):
        if len(self.coeffs) != len(MONOMIALS):
            raise StylobateError(f"expected {len(MONOMIALS)} coefficients")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    # --- evaluation ---------------------------------------------------------

    def _check_domain(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if (
            np.any(x < -DOMAIN_TOL) or np.any(x > self.a + DOMAIN_TOL)
            or np.any(y < -DOMAIN_TOL) or np.any(y > self.b + DOMAIN_TOL)
        ):
            raise StylobateError(f"point outside the platform [0,{self.a}]x[0,{self.b}]")
        return x, y

    def __call__(self, x, y):
        x, y = self._check_domain(x, y)
        return self._poly(x, y)

    def _poly(self, x, y):
        out = np.zeros(np.broadcast(x, y).shape)
        for c, (i, j) in zip(self.coeffs, MONOMIALS):
            out = out + c * x**i * y**j
        return out if out.ndim else float(out)

    def gradient(self, x: float, y: float) -> np.ndarray:
        c = self.coeffs
        fx = c[1] + 2 * c[3] * x + c[5] * y + 2 * c[6] * x * y + c[7] * y * y
        fy = c[2] + 2 * c[4] * y + c[5] * x + c[6] * x * x + 2 * c[7] * x * y
        return np.array([fx, fy])

    def hessian(self, x: float, y: float) -> np.ndarray:
        c = self.coeffs
        fxx = 2 * c[3] + 2 * c[6] * y
        fyy = 2 * c[4] + 2 * c[7] * x
        fxy = c[5] + 2 * c[6] * x + 2 * c[7] * y
        return np.array([[fxx, fxy], [fxy, fyy]])

    # --- restrictions to the sides -------------------------------------------

    def boundary(self, side: str) -> ParabolicArc:
        c0, cx, cy, cxx, cyy, cxy, cxxy, cxyy = self.coeffs
        a, b = self.a, self.b
        if side == "east":
            return ParabolicArc(c0, cx, cxx, a)
        if side == "west":
            return ParabolicArc(c0 + cy * b + cyy * b * b, cx + cxy * b + cxyy * b * b, cxx + cxxy * b, a)
        if side == "south":
            return ParabolicArc(c0, cy, cyy, b)
        if side == "north":
            return ParabolicArc(c0 + cx * a + cxx * a * a, cy + cxy * a + cxxy * a * a, cyy + cxyy * a, b)
        raise StylobateError(f"unknown side {side!r}; choose from {', '.join(SIDES)}")

    def boundaries(self) -> BoundarySet:
        return BoundarySet(*(self.boundary(s) for s in SIDES))

    def __add__(self, other: "StylobateSurface") -> "StylobateSurface":
        return StylobateSurface(tuple(p + q for p, q in zip(self.coeffs, other.coeffs)), self.a, self.b)


def parthenon() -> StylobateSurface:
    """The published interpolant of the Parthenon platform."""
    return StylobateSurface(PARTHENON_COEFFS, WIDTH, LENGTH)


def coons_build(boundaries: BoundarySet) -> StylobateSurface:
    """Bilinearly blended Coons patch through four quadratic boundary arcs.

    Blending uses ``1 - t`` and ``t``; with quadratic sides this lands exactly
    in the eight-monomial basis of :data:`MONOMIALS` (no ``x^2 y^2`` term).
    """
    e, w, s, n = boundaries.east, boundaries.west, boundaries.south, boundaries.north
    a, b = e.length, s.length
    if not (math.isclose(w.length, a, rel_tol=1e-12) and math.isclose(n.length, b, rel_tol=1e-12)):
        raise StylobateError("opposite boundary arcs must span the same chord")
    mism = boundaries.corner_mismatch()
    bad = {k: d for k, d in mism.items() if d > CORNER_TOL}
    if bad:
        detail = ", ".join(f"{k}: {d:.3g} m" for k, d in bad.items())
        raise CornerMismatchError(f"boundary arcs disagree at corners ({detail})", mism)
    corners = {k: 0.5 * (p + q) for k, (p, q) in boundaries.corner_values().items()}

    # C[i, j] multiplies x^i y^j
    C = np.zeros((3, 3))
    lin_x_lo = np.array([1.0, -1.0 / a, 0.0])  # 1 - x/a
    lin_x_hi = np.array([0.0, 1.0 / a, 0.0])  # x/a
    lin_y_lo = np.array([1.0, -1.0 / b, 0.0])
    lin_y_hi = np.array([0.0, 1.0 / b, 0.0])
    C += np.outer(e.coeffs, lin_y_lo) + np.outer(w.coeffs, lin_y_hi)
    C += np.outer(lin_x_lo, s.coeffs) + np.outer(lin_x_hi, n.coeffs)
    C -= corners["SE"] * np.outer(lin_x_lo, lin_y_lo)
    C -= corners["NE"] * np.outer(lin_x_hi, lin_y_lo)
    C -= corners["SW"] * np.outer(lin_x_lo, lin_y_hi)
    C -= corners["NW"] * np.outer(lin_x_hi, lin_y_hi)
    return StylobateSurface(tuple(C[i, j] for i, j in MONOMIALS), a, b)


def elevation(surface: StylobateSurface, x: float, y: float) -> float:
    return surface(x, y)


def find_crown(surface: StylobateSurface, tol: float = 1e-13, max_iter: int = 50):
    """Interior maximum of the elevation field, as ``(x, y, z)``.

    Newton on the gradient from the platform centre.  If Newton leaves the
    platform, the best node of a 1 cm grid seeds a second Newton run.
    """

    def newton(p):
        for _ in range(max_iter):
            g = surface.gradient(*p)
            if np.linalg.norm(g) < tol:
                return p
            try:
                p = p - np.linalg.solve(surface.hessian(*p), g)
            except np.linalg.LinAlgError:
                return None
            if not (0 <= p[0] <= surface.a and 0 <= p[1] <= surface.b):
                return None
        return p if np.linalg.norm(surface.gradient(*p)) < 1e3 * tol else None

    p = newton(np.array([surface.a / 2, surface.b / 2]))
    if p is None:
        xs = np.arange(0.0, surface.a, 0.01)
        ys = np.arange(0.0, surface.b, 0.01)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        Z = surface._poly(X, Y)
        i, j = np.unravel_index(np.argmax(Z), Z.shape)
        on_edge = i in (0, len(xs) - 1) or j in (0, len(ys) - 1)
        p = None if on_edge else newton(np.array([xs[i], ys[j]]))
        if p is None:
            raise CrownError("no interior stationary point found")
    eig = np.linalg.eigvalsh(surface.hessian(*p))
    if not np.all(eig < 0):
        kind = "saddle" if eig.min() < 0 < eig.max() else "minimum or flat point"
        raise CrownError(f"stationary point at ({p[0]:.4g}, {p[1]:.4g}) is a {kind}, not a crown")
    return float(p[0]), float(p[1]), float(surface(p[0], p[1]))


def side_mean_slope(surface: StylobateSurface, side: str, n: int = 20001) -> float:
    """Arc-length weighted mean of the slope angle along one side, in degrees."""
    arc = surface.boundary(side)
    t = np.linspace(0.0, arc.length, n)
    d = arc.derivative(t)
    ds = np.sqrt(1.0 + d * d)
    ang = np.arctan(np.abs(d))
    return math.degrees(np.trapezoid(ang * ds, t) / np.trapezoid(ds, t))


def pair_mean_slope(surface: StylobateSurface, pair: str) -> float:
    """Mean slope of the two short (``"ew"``) or two long (``"ns"``) sides, degrees."""
    sides = {"ew": ("east", "west"), "ns": ("north", "south")}.get(pair)
    if sides is None:
        raise StylobateError("pair must be 'ew' or 'ns'")
    return 0.5 * sum(side_mean_slope(surface, s) for s in sides)


def export_mesh(surface: StylobateSurface, nx: int, ny: int) -> Mesh:
    if nx < 2 or ny < 2:
        raise StylobateError("mesh needs at least 2 nodes per direction")
    xs = np.linspace(0.0, surface.a, nx)
    ys = np.linspace(0.0, surface.b, ny)
    X, Y = np.meshgrid(xs, ys)  # rows follow y, x varies fastest
    Z = surface(X, Y)
    verts = np.stack([X.ravel(), Y.ravel(), np.asarray(Z).ravel()], axis=1)
    return Mesh(verts, grid_quads(nx, ny))
