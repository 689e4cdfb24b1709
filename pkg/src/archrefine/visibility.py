"""Plan-view test of whether corner columns stand out against open sky.

A corner column is *against the sky* for a viewer when every sampled sight
ray through its disc, followed from the eye to infinity, misses all other
occluders.  Rays are spread uniformly in angle over the disc's angular
extent, tangents included.

Two occluder models are provided:

``"peristyle"`` (default)
    The other columns of the outer colonnade as discs (corner columns and
    regular columns have their own radii), plus a solid inner core standing
    for the cella block, inset ``core_inset`` from the platform edge.
``"solid"``
    The whole platform rectangle as one solid.  A corner disc lies inside
    it, so every ray through the disc runs into the solid behind it and the
    corner is never against the sky.  Kept to show why the colonnade matters.

Because each occluder is convex, a whole fan of sampled rays can be tested
against it at once: the occluder covers an angular interval as seen from the
eye, and we only need to know whether some sampled angle falls inside it.
The result is the same as casting every ray one by one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CORNERS = ("SE", "NE", "SW", "NW")
FACADES = {
    "east": ("SE", "NE"),
    "west": ("SW", "NW"),
    "south": ("SE", "SW"),
    "north": ("NE", "NW"),
}
# sign of the centred (x, y) coordinates of each corner
_CORNER_SIGN = {"SE": (-1, -1), "NE": (1, -1), "SW": (-1, 1), "NW": (1, 1)}
CLASS_LABELS = ("none", "one", "both")

DEFAULT_RAYS = 64
CORNER_DIAMETER = 1.947
REGULAR_DIAMETER = 1.905


class VisibilityError(ValueError):
    pass


@dataclass(frozen=True)
class Footprint:
    a: float = 30.9
    b: float = 69.5
    corner_column_radius: float = CORNER_DIAMETER / 2
    column_inset: float | None = None  # centre to edge; defaults to the corner radius
    column_radius: float = REGULAR_DIAMETER / 2
    n_short: int = 8
    n_long: int = 17
    core_inset: float = 4.6
    model: str = "peristyle"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise VisibilityError("platform sides must be positive")
        if not (self.corner_column_radius > 0 and self.column_radius > 0):
            raise VisibilityError("column radii must be positive")
        if self.column_inset is None:
            object.__setattr__(self, "column_inset", self.corner_column_radius)
        if not self.column_inset > 0:
            raise VisibilityError("column inset must be positive")
        if self.n_short < 2 or self.n_long < 2:
            raise VisibilityError("each side needs at least its two corner columns")
        if self.model not in ("peristyle", "solid"):
            raise VisibilityError("model must be 'peristyle' or 'solid'")

    # centred frame: platform is [-a/2, a/2] x [-b/2, b/2]
    def corner_center(self, corner: str) -> tuple[float, float]:
        sx, sy = _CORNER_SIGN[corner]
        return sx * (self.a / 2 - self.column_inset), sy * (self.b / 2 - self.column_inset)

    def columns(self) -> tuple[np.ndarray, np.ndarray, list]:
        """Centres, radii and corner labels (``None`` for regular columns)."""
        A, B, d = self.a / 2, self.b / 2, self.column_inset
        xs = np.linspace(-A + d, A - d, self.n_short)
        ys = np.linspace(-B + d, B - d, self.n_long)
        pts = [(x, -B + d) for x in xs] + [(x, B - d) for x in xs]
        pts += [(-A + d, y) for y in ys[1:-1]] + [(A - d, y) for y in ys[1:-1]]
        centers = {self.corner_center(c): c for c in CORNERS}
        labels = [centers.get((float(x), float(y))) for x, y in pts]
        radii = [self.corner_column_radius if lab else self.column_radius for lab in labels]
        return np.array(pts, dtype=float), np.array(radii), labels

    def core(self):
        A, B, c = self.a / 2, self.b / 2, self.core_inset
        if c >= A or c >= B:
            return None
        return (-A + c, A - c, -B + c, B - c)

    def to_centered(self, x, y):
        return np.asarray(x, dtype=float) - self.a / 2, np.asarray(y, dtype=float) - self.b / 2

    def inside(self, x, y, centered: bool = False):
        if not centered:
            x, y = self.to_centered(x, y)
        return (np.abs(x) <= self.a / 2) & (np.abs(y) <= self.b / 2)


@dataclass(frozen=True)
class VantageClass:
    facade: str
    corners: tuple[tuple[str, bool], ...]

    @property
    def code(self) -> int:
        return sum(flag for _, flag in self.corners)

    @property
    def label(self) -> str:
        return CLASS_LABELS[self.code]


def _rel_angle(ux, uy, wx, wy):
    return np.arctan2(ux * wy - uy * wx, ux * wx + uy * wy)


def _fan_hits(lo, hi, half, n_rays):
    """Does any of ``n_rays`` angles ``linspace(-half, half)`` fall in ``[lo, hi]``?"""
    hit = np.zeros(np.broadcast(lo, hi, half).shape, dtype=bool)
    m = 0.5 * (n_rays - 1)
    off = 0.5 if n_rays % 2 == 0 else 0.0
    for shift in (0.0, 2 * math.pi, -2 * math.pi):
        l_u = np.maximum((lo + shift) / half, -1.0) * m
        h_u = np.minimum((hi + shift) / half, 1.0) * m
        hit |= (l_u <= h_u) & (np.ceil(l_u - off) <= np.floor(h_u - off))
    return hit


def _against_sky(fp: Footprint, vx, vy, corner: str, n_rays: int):
    """Vectorised over viewer positions given in the centred frame."""
    if n_rays < 2:
        raise VisibilityError("need at least 2 rays (the two tangents)")
    cx, cy = fp.corner_center(corner)
    ux, uy = cx - vx, cy - vy
    dist = np.hypot(ux, uy)
    ux, uy = ux / dist, uy / dist
    half = np.arcsin(np.minimum(fp.corner_column_radius / dist, 1.0))
    blocked = np.zeros(np.shape(vx), dtype=bool)

    if fp.model == "solid":
        boxes = [(-fp.a / 2, fp.a / 2, -fp.b / 2, fp.b / 2)]
    else:
        boxes = [fp.core()] if fp.core() is not None else []
        pts, radii, labels = fp.columns()
        for (px, py), r, lab in zip(pts, radii, labels):
            if lab == corner:
                continue
            wx, wy = px - vx, py - vy
            dj = np.hypot(wx, wy)
            delta = _rel_angle(ux, uy, wx, wy)
            aj = np.arcsin(np.minimum(r / dj, 1.0))
            blocked |= _fan_hits(delta - aj, delta + aj, half, n_rays)

    for x0, x1, y0, y1 in boxes:
        # interval relative to the box-centre direction cannot wrap for an outside eye
        bx, by = 0.5 * (x0 + x1) - vx, 0.5 * (y0 + y1) - vy
        bn = np.hypot(bx, by)
        bx, by = bx / bn, by / bn
        rel = np.stack([_rel_angle(bx, by, qx - vx, qy - vy)
                        for qx, qy in ((x0, y0), (x0, y1), (x1, y0), (x1, y1))])
        base = _rel_angle(ux, uy, bx, by)
        blocked |= _fan_hits(base + rel.min(0), base + rel.max(0), half, n_rays)
    return ~blocked


def _check_viewer(fp: Footprint, x: float, y: float):
    cx, cy = fp.to_centered(x, y)
    if fp.inside(cx, cy, centered=True):
        raise VisibilityError(f"viewer ({x:g}, {y:g}) stands on the platform")
    pts, radii, _ = fp.columns()
    if np.any(np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) <= radii):
        raise VisibilityError(f"viewer ({x:g}, {y:g}) stands inside a column")
    return float(cx), float(cy)


def corner_against_sky(fp: Footprint, viewer, corner: str, n_rays: int = DEFAULT_RAYS) -> bool:
    """``viewer`` is ``(x, y)`` in platform coordinates (origin at the SE corner)."""
    if corner not in CORNERS:
        raise VisibilityError(f"unknown corner {corner!r}; choose from {', '.join(CORNERS)}")
    cx, cy = _check_viewer(fp, *viewer)
    return bool(_against_sky(fp, np.float64(cx), np.float64(cy), corner, n_rays))


def classify_vantage(fp: Footprint, viewer, facade: str, n_rays: int = DEFAULT_RAYS) -> VantageClass:
    if facade not in FACADES:
        raise VisibilityError(f"unknown facade {facade!r}; choose from {', '.join(FACADES)}")
    return VantageClass(
        facade, tuple((c, corner_against_sky(fp, viewer, c, n_rays)) for c in FACADES[facade])
    )


@dataclass
class VantageMap:
    footprint: Footprint
    xs: np.ndarray  # cell-centre x, platform coordinates
    ys: np.ndarray
    cell: float
    n_rays: int
    corners: dict = field(repr=False)  # corner -> bool (ny, nx)
    mask: np.ndarray = field(repr=False)  # True where the cell is on the platform

    def codes(self, facade: str) -> np.ndarray:
        c1, c2 = FACADES[facade]
        return (self.corners[c1].astype(np.int8) + self.corners[c2].astype(np.int8))

    def both(self, facade: str) -> np.ndarray:
        return self.codes(facade) == 2

    def area(self, facade: str, code: int = 2) -> float:
        return float(np.count_nonzero(self.codes(facade) == code)) * self.cell**2

    def to_csv(self, facade: str, path) -> Path:
        """Rows follow ``ys`` (south to north order of y), columns follow ``xs``."""
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerows(self.codes(facade).tolist())
        return path


def default_extent(fp: Footprint, size: float = 300.0):
    return (fp.a / 2 - size / 2, fp.a / 2 + size / 2, fp.b / 2 - size / 2, fp.b / 2 + size / 2)


def _axis(lo, hi, cell, center):
    n = int(round((hi - lo) / cell))
    if n < 1:
        raise VisibilityError("extent is smaller than one cell")
    # centred offsets keep the grid exactly mirror-symmetric about the platform centre
    start = (lo - center)
    return start + (np.arange(n) + 0.5) * cell


def vantage_map(fp: Footprint, extent=None, cell: float = 1.0, n_rays: int = DEFAULT_RAYS) -> VantageMap:
    """Classify every cell of ``extent = (xmin, xmax, ymin, ymax)``; cells on the platform are masked."""
    if not cell > 0:
        raise VisibilityError("cell must be positive")
    if extent is None:
        extent = default_extent(fp)
    xmin, xmax, ymin, ymax = extent
    ox = _axis(xmin, xmax, cell, fp.a / 2)
    oy = _axis(ymin, ymax, cell, fp.b / 2)
    X, Y = np.meshgrid(ox, oy)
    mask = fp.inside(X, Y, centered=True)
    pts, radii, _ = fp.columns()
    for (px, py), r in zip(pts, radii):
        mask |= np.hypot(X - px, Y - py) <= r
    corners = {}
    with np.errstate(invalid="ignore", divide="ignore"):
        for c in CORNERS:
            corners[c] = _against_sky(fp, X, Y, c, n_rays) & ~mask
    return VantageMap(fp, ox + fp.a / 2, oy + fp.b / 2, cell, n_rays, corners, mask)
