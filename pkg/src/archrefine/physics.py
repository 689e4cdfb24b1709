"""Order-of-magnitude physics: rain film drainage and column buckling."""

from __future__ import annotations

import math
from dataclasses import dataclass

G = 9.81
NU_WATER_20C = 1e-6
MARBLE_CRUSH = 100e6

# shallow-slope laminar film only
MAX_FILM_SLOPE = 0.05
SLENDER_LIMIT = 20.0


class RegimeError(ValueError):
    pass


@dataclass(frozen=True)
class FilmFlow:
    theta: float  # slope, rad
    h0: float  # initial film thickness, m
    L: float  # runoff distance, m
    nu: float = NU_WATER_20C
    g: float = G

    def __post_init__(self):
        for name in ("theta", "h0", "L", "nu", "g"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.theta >= MAX_FILM_SLOPE:
            raise RegimeError(
                f"slope {self.theta:.3g} rad breaks the thin laminar film assumption "
                f"(theta << 1, limit {MAX_FILM_SLOPE} rad)"
            )

    @classmethod
    def from_degrees(cls, slope_deg: float, h0: float, L: float, **kw) -> "FilmFlow":
        return cls(math.radians(slope_deg), h0, L, **kw)


def film_state(flow: FilmFlow, h: float) -> tuple[float, float]:
    """Depth-averaged velocity and flux per unit width of a Nusselt film."""
    if not 0 < h <= flow.h0:
        raise ValueError("film thickness must lie in (0, h0]")
    U = flow.g * math.sin(flow.theta) * h * h / (3.0 * flow.nu)
    return U, U * h


def mean_film_velocity(flow: FilmFlow) -> float:
    # <h^2> over a draining film is h0^2 / 3
    return flow.g * math.sin(flow.theta) * flow.h0**2 / (9.0 * flow.nu)


def drainage_time(flow: FilmFlow) -> float:
    """Seconds to drain a film of initial thickness ``h0`` over ``L``."""
    return flow.L / mean_film_velocity(flow)


@dataclass(frozen=True)
class BucklingCase:
    E: float  # Young's modulus, Pa
    L: float  # column height, m
    r: float  # radius, m
    sigma_crush: float = MARBLE_CRUSH

    def __post_init__(self):
        for name in ("E", "L", "r", "sigma_crush"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class BucklingReport:
    P_cr: float  # N
    sigma_cr: float  # Pa
    failure_mode: str  # "crush" or "buckle"
    slenderness: float  # L / r
    notes: tuple[str, ...] = ()


def buckling_report(case: BucklingCase) -> BucklingReport:
    """Euler load of a solid circular shaft against the crushing strength."""
    P = math.pi**3 * case.r**4 * case.E / (4.0 * case.L**2)
    sigma = P / (math.pi * case.r**2)
    mode = "crush" if sigma > case.sigma_crush else "buckle"
    lam = case.L / case.r
    notes = ()
    if lam < SLENDER_LIMIT:
        notes = (f"L/r = {lam:.3g} < {SLENDER_LIMIT:g}: stocky column, Euler theory is marginal here",)
    return BucklingReport(P, sigma, mode, lam, notes)
