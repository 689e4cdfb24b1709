"""Deterministic SVG figures: facades, column profile pairs, line illusions, vantage maps.

Every coordinate is computed from the geometry modules and written with nine
significant digits.  Metadata (seed, which variant is which, model
parameters) goes into a leading XML comment as ``key=value`` lines, never
into drawing order or styling.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .column import ColumnProfile, penrose
from .curvefit import ParabolicArc
from .perception import tilt_convergence_height
from .stylobate import parthenon


def fmt(v: float) -> str:
    s = f"{float(v):.9g}"
    return "0" if s == "-0" else s


def _points(xs, ys) -> str:
    return " ".join(f"{fmt(x)},{fmt(y)}" for x, y in zip(xs, ys))


def _path(xs, ys, cls: str, close: bool = False, **attrs) -> str:
    d = "M " + _points(xs[:1], ys[:1]) + " L " + _points(xs[1:], ys[1:]) + (" Z" if close else "")
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<path class="{cls}" d="{d}"{extra}/>'


def _line(x1, y1, x2, y2, cls: str, **attrs) -> str:
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return (f'<line class="{cls}" x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}"{extra}/>')


def _document(width: float, height: float, body: list[str], meta: dict) -> str:
    lines = ["<?xml version=\"1.0\" encoding=\"UTF-8\"?>", "<!--", f"generator=archrefine {__version__}"]
    for k, v in meta.items():
        lines.append(f"{k}={str(v).replace('--', '-')}")
    lines.append("-->")
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(width)}" '
        f'height="{fmt(height)}" viewBox="0 0 {fmt(width)} {fmt(height)}">'
    )
    lines.append('<rect class="background" x="0" y="0" width="100%" height="100%" fill="white"/>')
    lines.extend(body)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def parse_metadata(svg: str) -> dict:
    start, end = svg.index("<!--") + 4, svg.index("-->")
    out = {}
    for line in svg[start:end].strip().splitlines():
        k, _, v = line.partition("=")
        out[k] = v
    return out


# --- facades --------------------------------------------------------------------


@dataclass(frozen=True)
class FacadeSpec:
    n_columns: int = 8
    profile: ColumnProfile = field(default_factory=penrose)
    stylobate: ParabolicArc | None = field(default_factory=lambda: parthenon().boundary("east"))
    tilt_deg: float = 0.4
    entasis: bool = True
    curvature: bool = True
    scale: float = 10.0  # px per m
    vertical_exaggeration: float = 1.0
    stylobate_depth: float = 0.55  # m
    architrave_depth: float = 1.35  # m
    margin: float = 20.0  # px
    show_axes: bool = False
    samples: int = 201
    width: float = 30.9  # platform width used when no stylobate arc is given

    def __post_init__(self):
        if self.n_columns < 2:
            raise ValueError("a facade needs at least two columns")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if self.samples < 100:
            raise ValueError("curved horizontals need at least 100 samples")
        if not 0 <= self.tilt_deg < 90:
            raise ValueError("tilt must lie in [0, 90) degrees")

    @property
    def span(self) -> float:
        return self.stylobate.length if self.stylobate is not None else self.width

    def elevation(self, x):
        x = np.asarray(x, dtype=float)
        if self.curvature and self.stylobate is not None:
            return self.vertical_exaggeration * self.stylobate(x)
        return np.zeros_like(x)

    def column_positions(self) -> np.ndarray:
        inset = self.profile.c0
        return np.linspace(inset, self.span - inset, self.n_columns)

    def convergence_height(self) -> float | None:
        if self.tilt_deg == 0:
            return None
        xs = self.column_positions()
        return tilt_convergence_height(0.5 * (xs[-1] - xs[0]), self.tilt_deg)


class _Frame:
    """Metres (x along the facade, z up) to SVG pixels."""

    def __init__(self, scale, margin, x0, z_top, dx=0.0):
        self.scale, self.margin, self.x0, self.z_top, self.dx = scale, margin, x0, z_top, dx

    def px(self, x):
        return self.dx + self.margin + (np.asarray(x, dtype=float) - self.x0) * self.scale

    def py(self, z):
        return self.margin + (self.z_top - np.asarray(z, dtype=float)) * self.scale


def _facade_body(spec: FacadeSpec, dx: float = 0.0) -> tuple[list[str], float, float]:
    prof = spec.profile if spec.entasis else spec.profile.chord()
    h = prof.h
    xs_line = np.linspace(0.0, spec.span, spec.samples)
    e_line = spec.elevation(xs_line)
    z_top = float(e_line.max()) + h + spec.architrave_depth
    z_bot = float(e_line.min()) - spec.stylobate_depth
    fr = _Frame(spec.scale, spec.margin, 0.0, z_top, dx)
    width = 2 * spec.margin + spec.span * spec.scale
    height = 2 * spec.margin + (z_top - z_bot) * spec.scale

    body = [f'<g class="facade" fill="none" stroke="black" stroke-width="1">']

    def horizontal(offset, cls):
        if spec.curvature and spec.stylobate is not None:
            return _path(fr.px(xs_line), fr.py(e_line + offset), cls)
        ends = np.array([0.0, spec.span])
        return _path(fr.px(ends), fr.py(np.zeros(2) + offset), cls)

    body.append(horizontal(0.0, "stylobate"))
    body.append(horizontal(-spec.stylobate_depth, "stylobate-base"))
    body.append(horizontal(h, "architrave"))
    body.append(horizontal(h + spec.architrave_depth, "architrave-top"))

    H = spec.convergence_height()
    xs = spec.column_positions()
    xc = 0.5 * spec.span
    base_z = spec.elevation(xs)
    z = np.linspace(0.0, h, 101)
    r = prof.radius(z)
    for i, (x, zb) in enumerate(zip(xs, base_z)):
        lean = 0.0 if H is None else math.atan2(xc - x, H)
        ax, az = math.sin(lean), math.cos(lean)  # axis direction
        nx, nz = math.cos(lean), -math.sin(lean)  # outward normal (to the right)
        left_x = x + z * ax - r * nx
        left_z = zb + z * az - r * nz
        right_x = x + z * ax + r * nx
        right_z = zb + z * az + r * nz
        px = np.concatenate([left_x, right_x[::-1]])
        pz = np.concatenate([left_z, right_z[::-1]])
        body.append(_path(fr.px(px), fr.py(pz), "column", close=True, data_index=str(i)))
        if spec.show_axes:
            body.append(_line(fr.px(x), fr.py(zb), fr.px(x + h * ax), fr.py(zb + h * az),
                              "axis", data_index=str(i), stroke_dasharray="4 3"))
    body.append("</g>")
    return body, width, height


def _facade_meta(spec: FacadeSpec, prefix: str = "") -> dict:
    H = spec.convergence_height()
    return {
        f"{prefix}curvature": "on" if spec.curvature else "off",
        f"{prefix}entasis": "on" if spec.entasis else "off",
        f"{prefix}tilt_deg": fmt(spec.tilt_deg),
        f"{prefix}convergence_height_m": "none" if H is None else fmt(H),
    }


def facade_svg(spec: FacadeSpec) -> str:
    body, w, h = _facade_body(spec)
    prof = spec.profile
    meta = {
        "figure": "facade",
        "n_columns": spec.n_columns,
        "scale_px_per_m": fmt(spec.scale),
        "vertical_exaggeration": fmt(spec.vertical_exaggeration),
        "profile": f"{fmt(prof.c0)},{fmt(prof.c1)},{fmt(prof.c2)},{fmt(prof.h)}",
        **_facade_meta(spec),
    }
    if spec.stylobate is not None:
        s = spec.stylobate
        meta["stylobate"] = f"{fmt(s.c0)},{fmt(s.c1)},{fmt(s.c2)},{fmt(s.length)}"
    return _document(w, h, body, meta)


def facade_pair_svg(spec: FacadeSpec, seed: int = 0) -> str:
    """The facade with and without platform curvature, in seeded random order."""
    curved = FacadeSpec(**{**spec.__dict__, "curvature": True})
    straight = FacadeSpec(**{**spec.__dict__, "curvature": False})
    order = [("curved", curved), ("straight", straight)]
    random.Random(seed).shuffle(order)
    body, width, height = [], 0.0, 0.0
    for label, (name, sp) in zip("AB", order):
        part, w, h = _facade_body(sp, dx=width)
        body += part
        body.append(f'<text x="{fmt(width + w / 2)}" y="{fmt(h - 4)}" text-anchor="middle">{label}</text>')
        width += w
        height = max(height, h)
    meta = {"figure": "facade-pair", "seed": seed, "A": order[0][0], "B": order[1][0],
            "scale_px_per_m": fmt(spec.scale)}
    return _document(width, height, body, meta)


# --- column profile pairs -------------------------------------------------------


def _outline(profile: ColumnProfile, x_axis: float, scale: float, margin: float, z_top: float, n: int):
    z = np.linspace(0.0, profile.h, n)
    r = profile.radius(z)
    fr = _Frame(scale, margin, 0.0, z_top)
    xs = np.concatenate([x_axis - r, (x_axis + r)[::-1]])
    zs = np.concatenate([z, z[::-1]])
    return fr.px(xs), fr.py(zs)


def profile_pair_svg(p1: ColumnProfile, p2: ColumnProfile, seed: int = 0,
                     scale: float = 100.0, samples: int = 201) -> str:
    """Two shaft outlines side by side at one scale, left/right order drawn from ``seed``."""
    if not math.isclose(p1.h, p2.h, rel_tol=1e-12):
        raise ValueError("profiles must have the same height to be compared")
    order = [("p1", p1), ("p2", p2)]
    random.Random(seed).shuffle(order)
    rmax = max(float(np.max(p.radius(np.linspace(0, p.h, samples)))) for p in (p1, p2))
    margin = 20.0
    gap = 2.0 * rmax
    z_top = p1.h
    body = ['<g class="profiles" fill="none" stroke="black" stroke-width="1">']
    for k, (label, (name, prof)) in enumerate(zip("AB", order)):
        axis = rmax + k * (2 * rmax + gap)
        px, py = _outline(prof, axis, scale, margin, z_top, samples)
        body.append(_path(px, py, "outline", close=True, data_label=label))
        body.append(f'<text x="{fmt(margin + axis * scale)}" y="{fmt(margin + p1.h * scale + 16)}" '
                    f'text-anchor="middle">{label}</text>')
    body.append("</g>")
    width = 2 * margin + (4 * rmax + gap) * scale
    height = 2 * margin + p1.h * scale + 20
    meta = {"figure": "profile-pair", "seed": seed, "A": order[0][0], "B": order[1][0],
            "scale_px_per_m": fmt(scale)}
    for name, prof in (("p1", p1), ("p2", p2)):
        meta[name] = f"{fmt(prof.c0)},{fmt(prof.c1)},{fmt(prof.c2)},{fmt(prof.h)}"
    return _document(width, height, body, meta)


# --- illusions ------------------------------------------------------------------

ILLUSION_KINDS = ("hering", "wundt", "combined", "perpendicular", "zollner")


@dataclass(frozen=True)
class IllusionSpec:
    kind: str = "hering"
    n_modifiers: int = 24
    angle_range: tuple[float, float] = (10.0, 80.0)  # degrees from the target lines
    target_offset: float = 60.0  # px above and below the centre
    width: int = 600
    height: int = 400
    column_tilt_deg: float = 0.4

    def __post_init__(self):
        if self.kind not in ILLUSION_KINDS:
            raise ValueError(f"unknown illusion {self.kind!r}; choose from {', '.join(ILLUSION_KINDS)}")
        if self.n_modifiers < 2:
            raise ValueError("need at least two modifier lines")
        lo, hi = self.angle_range
        if not (0 < lo <= hi <= 90):
            raise ValueError("modifier angles must lie in (0, 90] degrees")


def _clip_to_box(px, py, dx, dy, w, h):
    """Segment of the line through (px, py) with direction (dx, dy) inside [0,w]x[0,h]."""
    ts = []
    if dx:
        ts += [(0 - px) / dx, (w - px) / dx]
    if dy:
        ts += [(0 - py) / dy, (h - py) / dy]
    pts = []
    for t in ts:
        x, y = px + t * dx, py + t * dy
        if -1e-9 <= x <= w + 1e-9 and -1e-9 <= y <= h + 1e-9:
            pts.append((t, x, y))
    pts.sort()
    (_, x1, y1), (_, x2, y2) = pts[0], pts[-1]
    return x1, y1, x2, y2


def _fan(px, py, angles_deg, w, h, cls):
    out = []
    for a in angles_deg:
        t = math.radians(a)
        out.append(_line(*_clip_to_box(px, py, math.cos(t), -math.sin(t), w, h), cls))
    return out


def illusion_svg(spec: IllusionSpec) -> str:
    w, h = spec.width, spec.height
    cx, cy = w / 2, h / 2
    lo, hi = spec.angle_range
    n_half = max(spec.n_modifiers // 2, 1)
    base = list(np.linspace(lo, hi, n_half))
    mirrored = base + [180.0 - a for a in base]
    body = ['<g class="illusion" stroke="black" stroke-width="1">']
    meta = {"figure": "illusion", "kind": spec.kind, "n_modifiers": spec.n_modifiers,
            "angle_range_deg": f"{fmt(lo)},{fmt(hi)}"}

    if spec.kind in ("hering", "combined"):
        body += _fan(cx, cy, mirrored, w, h, "modifier hering")
    if spec.kind in ("wundt", "combined"):
        # two fans converging on vanishing points at the left and right edges
        body += _fan(0.0, cy, base + [-a for a in base], w, h, "modifier wundt")
        body += _fan(float(w), cy, [180.0 - a for a in base] + [180.0 + a for a in base], w, h,
                     "modifier wundt")
    if spec.kind == "perpendicular":
        tilt = math.radians(spec.column_tilt_deg)
        for x in np.linspace(w * 0.05, w * 0.95, spec.n_modifiers):
            # each line leans toward the centre by the column tilt, like a shaft axis
            lean = math.copysign(tilt, cx - x) if x != cx else 0.0
            dx, dy = math.sin(lean), -math.cos(lean)
            body.append(_line(*_clip_to_box(x, cy, dx, dy, w, h), "modifier perpendicular"))
        meta["modifier_tilt_deg"] = fmt(spec.column_tilt_deg)

    if spec.kind == "zollner":
        body += _zollner(spec)
    else:
        for y in (cy - spec.target_offset, cy + spec.target_offset):
            body.append(_line(0.0, y, float(w), y, "target", stroke="red", stroke_width="3"))
    body.append("</g>")
    return _document(w, h, body, meta)


def _zollner(spec: IllusionSpec) -> list[str]:
    # integer endpoints keep the emitted 45 degree slopes exactly equal
    w, h = spec.width, spec.height
    n_main = max(spec.n_modifiers // 4, 3)
    step = int(round(w / (n_main + 1)))
    length = int(min(w, h) * 0.9)
    y0 = (h - length) // 2
    out = []
    cross = spec.angle_range[1]  # hatch-to-main-line angle
    half = 12.0
    for k in range(n_main):
        x0 = step * (k + 1) - length // 2
        out.append(_line(x0, y0, x0 + length, y0 + length, "target", stroke="red", stroke_width="3"))
        # hatches alternate their sense from one main line to the next
        ang = math.radians(45.0 + (cross if k % 2 == 0 else -cross))
        dx, dy = math.cos(ang), math.sin(ang)
        for t in np.linspace(0.08, 0.92, 12):
            mx, my = x0 + t * length, y0 + t * length
            out.append(_line(mx - half * dx, my - half * dy, mx + half * dx, my + half * dy, "modifier zollner"))
    return out


# --- vantage maps ---------------------------------------------------------------

CLASS_COLORS = {"first": "#3b6fd8", "second": "#d83b3b", "both": "#8e3bd8"}


def vantage_svg(vmap, facade: str | None = None, px_per_cell: float = 2.0) -> str:
    """Plan view with north up and east to the right.

    With ``facade`` set, cells where only its first / second corner is against
    the sky are blue / red and cells where both are, purple.  Without it, the
    both-corner regions of all four facades are drawn in purple.
    """
    from .visibility import FACADES

    nx, ny = len(vmap.xs), len(vmap.ys)
    s = px_per_cell
    layers = []
    if facade is None:
        for f in FACADES:
            layers.append((vmap.both(f), CLASS_COLORS["both"], f"both {f}"))
    else:
        c1, c2 = FACADES[facade]
        a1, a2 = vmap.corners[c1], vmap.corners[c2]
        layers = [(a1 & ~a2, CLASS_COLORS["first"], f"{c1} only"),
                  (a2 & ~a1, CLASS_COLORS["second"], f"{c2} only"),
                  (a1 & a2, CLASS_COLORS["both"], "both")]
    body = []
    for mask, color, label in layers:
        body.append(f'<g class="region" fill="{color}" data-label="{label}">')
        # grid row ix along x (north) maps to svg rows from the top; y (west) maps leftwards
        grid = mask.T[::-1, ::-1]  # [x descending, y descending]
        for row in range(grid.shape[0]):
            line = grid[row]
            col = 0
            while col < ny:
                if line[col]:
                    start = col
                    while col < ny and line[col]:
                        col += 1
                    body.append(f'<rect x="{fmt(start * s)}" y="{fmt(row * s)}" '
                                f'width="{fmt((col - start) * s)}" height="{fmt(s)}"/>')
                else:
                    col += 1
        body.append("</g>")
    fp = vmap.footprint
    x_hi = vmap.xs[-1] + vmap.cell / 2
    y_hi = vmap.ys[-1] + vmap.cell / 2
    k = s / vmap.cell
    body.append(f'<rect class="footprint" x="{fmt((y_hi - fp.b) * k)}" y="{fmt((x_hi - fp.a) * k)}" '
                f'width="{fmt(fp.b * k)}" height="{fmt(fp.a * k)}" fill="#444"/>')
    meta = {"figure": "vantage-map", "facade": facade or "all", "cell_m": fmt(vmap.cell),
            "rays": vmap.n_rays, "corner_radius_m": fmt(fp.corner_column_radius), "model": fp.model}
    return _document(ny * s, nx * s, body, meta)
