"""Visual geometry: curvature detectability, visual angle and lettering scale."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .curvefit import sagitta

ARCSEC = math.pi / (180.0 * 3600.0)


@dataclass(frozen=True)
class AngularThreshold:
    """A visual-angle threshold, stored in arcseconds."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("angular threshold must be positive")

    @property
    def radians(self) -> float:
        return self.value * ARCSEC

    @classmethod
    def from_radians(cls, rad: float) -> "AngularThreshold":
        return cls(rad / ARCSEC)

    @classmethod
    def parse(cls, text: str) -> "AngularThreshold":
        return cls.from_radians(parse_angle(text))


# threshold bands (arcsec) for detecting a departure from straightness
FINE_BAND = (AngularThreshold(3.0), AngularThreshold(18.0))
CONSERVATIVE_BAND = (AngularThreshold(120.0), AngularThreshold(420.0))
BANDS = {"fine": FINE_BAND, "conservative": CONSERVATIVE_BAND}

_UNITS = {"arcsec": ARCSEC, "arcmin": 60 * ARCSEC, "deg": math.pi / 180, "rad": 1.0}
_ANGLE_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(arcsec|arcmin|deg|rad)\s*$")


def parse_angle(text: str) -> float:
    """``"120arcsec"``, ``"2 arcmin"``, ``"0.4deg"`` -> radians.  A unit is required."""
    m = _ANGLE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse angle {text!r}; use a suffix arcsec, arcmin, deg or rad")
    return float(m.group(1)) * _UNITS[m.group(2)]


def humanize_angle(rad: float) -> str:
    deg = math.degrees(rad)
    if abs(deg) >= 1:
        return f"{deg:.4g} deg"
    if abs(deg) * 60 >= 1:
        return f"{deg * 60:.4g} arcmin"
    return f"{deg * 3600:.4g} arcsec"


def critical_sagitta(D: float, threshold: AngularThreshold) -> float:
    """Smallest sagitta visible at distance ``D`` for the given threshold."""
    if not D > 0:
        raise ValueError("viewing distance must be positive")
    return D * math.tan(threshold.radians)


@dataclass(frozen=True)
class Detectability:
    detectable: bool
    margin: float  # sagitta minus critical sagitta, m
    sagitta: float
    critical: float


def is_detectable(curve, D: float, threshold: AngularThreshold) -> Detectability:
    s = sagitta(curve)
    crit = critical_sagitta(D, threshold)
    return Detectability(s > crit, s - crit, s, crit)


def detection_limit(curve, threshold: AngularThreshold) -> float:
    """Distance beyond which the curve's sagitta drops below the threshold."""
    return sagitta(curve) / math.tan(threshold.radians)


def visual_angle(h: float, d: float) -> float:
    if not (h > 0 and d > 0):
        raise ValueError("size and distance must be positive")
    return 2.0 * math.atan(h / (2.0 * d))


def scaled_letter_height(H: float, D: float, theta: float) -> float:
    """Letter height that subtends ``theta`` when centred ``H`` above eye level at range ``D``."""
    if not D > 0:
        raise ValueError("horizontal distance must be positive")
    if not 0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    return 2.0 * math.hypot(H, D) * math.tan(theta / 2.0)


@dataclass(frozen=True)
class PlacedText:
    H: float  # centre height above eye level, m
    h: float  # letter height, m
    D: float = 1.0  # horizontal distance, m

    def __post_init__(self):
        if not (self.h > 0 and self.D > 0):
            raise ValueError("letter height and distance must be positive")

    def angle(self, D: float | None = None) -> float:
        D = self.D if D is None else D
        return visual_angle(self.h, math.hypot(self.H, D))


@dataclass(frozen=True)
class Equalization:
    status: str  # "unique", "none" or "degenerate"
    distance: float | None
    note: str = ""


SCAN_RANGE = (1e-3, 1e6)


def _angle_gap(row1: PlacedText, row2: PlacedText, D: float) -> float:
    return row1.angle(D) - row2.angle(D)


def equalization_distance(row1: PlacedText, row2: PlacedText, n_scan: int = 2000) -> Equalization:
    """Horizontal distance at which both rows subtend the same visual angle.

    A geometric scan over ``SCAN_RANGE`` brackets the sign change, then
    bisection refines it to 1e-9 relative.
    """
    if row1.H == row2.H:
        if row1.h == row2.h:
            return Equalization("degenerate", None, "identical rows subtend equal angles at every distance")
        return Equalization("none", None, "rows at the same height with different letters never match")
    Ds = np.geomspace(*SCAN_RANGE, n_scan)
    g = np.array([_angle_gap(row1, row2, D) for D in Ds])
    sign = np.sign(g)
    hits = np.nonzero(g == 0)[0]
    if len(hits):
        return Equalization("unique", float(Ds[hits[0]]))
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) == 0:
        lower = row1 if abs(row1.H) < abs(row2.H) else row2
        return Equalization(
            "none", None,
            f"no sign change on {SCAN_RANGE[0]:g}..{SCAN_RANGE[1]:g} m; "
            f"the row at H={lower.H:g} m subtends more throughout",
        )
    i = flips[0]
    lo, hi = Ds[i], Ds[i + 1]
    D = bisect(lambda x: _angle_gap(row1, row2, x), lo, hi, xtol=1e-300, rtol=1e-9 * 0.5, maxiter=500)
    note = "" if len(flips) == 1 else f"{len(flips)} sign changes found; first one reported"
    return Equalization("unique", float(D), note)


def tilt_convergence_height(half_span: float, tilt_deg: float) -> float:
    """Height where two axes leaning inward by ``tilt_deg`` from ``half_span`` off-centre meet."""
    if not half_span > 0:
        raise ValueError("half span must be positive")
    if not 0 < tilt_deg < 90:
        raise ValueError("tilt must lie strictly between 0 and 90 degrees")
    return half_span / math.tan(math.radians(tilt_deg))


# anthropometric anchors: (stature cm, body/head ratio)
BHR_ANCHORS = ((165.0, 7.5), (180.0, 8.0))
BHR_RANGE = (140.0, 210.0)
FRIEZE_BHR = (7.40, 7.45)


def expected_bhr(stature_cm: float) -> float:
    """Body-to-head ratio expected for an adult stature, from two anchors.

    Linear between the anchors and clamped outside them.
    """
    lo, hi = BHR_RANGE
    if not lo <= stature_cm <= hi:
        raise ValueError(f"stature {stature_cm} cm outside {lo:g}-{hi:g} cm")
    (s0, r0), (s1, r1) = BHR_ANCHORS
    t = min(max((stature_cm - s0) / (s1 - s0), 0.0), 1.0)
    return r0 + (r1 - r0) * t
