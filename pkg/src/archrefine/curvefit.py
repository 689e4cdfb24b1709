"""Least-squares fits of shallow arcs: parabola, circle and catenary.

All families are fitted to vertical residuals ``v - curve(s)`` so that their
rms values are directly comparable.  Circles and catenaries are written in a
vertex form (apex position, apex value, curvature or scale) which stays well
conditioned for the very flat arcs found on temple platforms, where the
centre of the osculating circle sits kilometres below the chord.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

FAMILIES = ("parabola", "circle", "catenary")
MIN_SAMPLES = {"parabola": 3, "circle": 3, "catenary": 4}

GN_MAX_ITER = 100
GN_RTOL = 1e-12


class FitError(ValueError):
    pass


class TooFewSamplesError(FitError):
    pass


class NonConvergenceError(FitError):
    """Raised when Gauss-Newton hits its iteration cap; ``best`` holds the last iterate."""

    def __init__(self, message: str, best: "FittedCurve"):
        super().__init__(message)
        self.best = best


class Sample1D(NamedTuple):
    s: float
    v: float


@dataclass(frozen=True)
class ParabolicArc:
    """``v(t) = c0 + c1 t + c2 t**2`` over the chord ``t in [0, length]``."""

    c0: float
    c1: float
    c2: float
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("arc length must be positive")

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, self.length)

    @property
    def coeffs(self) -> tuple[float, float, float]:
        return (self.c0, self.c1, self.c2)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.c0 + t * (self.c1 + t * self.c2)

    def derivative(self, t):
        return self.c1 + 2.0 * self.c2 * np.asarray(t, dtype=float)

    def sagitta(self) -> float:
        return abs(self.c2) * self.length**2 / 4.0

    def __add__(self, other: "ParabolicArc") -> "ParabolicArc":
        if not math.isclose(self.length, other.length, rel_tol=1e-12):
            raise ValueError("cannot add arcs over different chords")
        return ParabolicArc(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2, self.length)

    @classmethod
    def flat(cls, length: float, level: float = 0.0) -> "ParabolicArc":
        return cls(level, 0.0, 0.0, length)


@dataclass(frozen=True)
class FittedCurve:
    family: str
    params: dict
    rms_residual: float
    domain: tuple[float, float]
    degenerate: bool = False
    iterations: int = 0
    _fn: Callable = field(default=None, repr=False, compare=False)

    def __call__(self, s):
        return self._fn(np.asarray(s, dtype=float))

    def as_arc(self) -> ParabolicArc:
        """Parabola re-expressed over ``[0, s_max - s_min]``."""
        if self.family != "parabola":
            raise FitError("only parabola fits convert to a ParabolicArc")
        c0, c1, c2 = (self.params[k] for k in ("c0", "c1", "c2"))
        s0 = self.domain[0]
        return ParabolicArc(
            c0 + c1 * s0 + c2 * s0 * s0, c1 + 2 * c2 * s0, c2, self.domain[1] - s0
        )


def load_samples(path) -> list[Sample1D]:
    """Read an ``s,v`` CSV file (meters, header required)."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["s", "v"]:
            raise FitError(f"{path}: expected header 's,v'")
        return [Sample1D(float(row["s"]), float(row["v"])) for row in reader]


def _as_arrays(samples, v=None) -> tuple[np.ndarray, np.ndarray]:
    if v is None:
        arr = np.asarray([tuple(p) for p in samples], dtype=float).reshape(-1, 2)
        s, v = arr[:, 0], arr[:, 1]
    else:
        s = np.asarray(samples, dtype=float)
        v = np.asarray(v, dtype=float)
    if s.shape != v.shape or s.ndim != 1:
        raise FitError("s and v must be 1-D arrays of equal length")
    if not np.all(np.isfinite(s)) or not np.all(np.isfinite(v)):
        raise FitError("samples must be finite")
    if len(s) > 1 and not np.all(np.diff(s) > 0):
        raise FitError("s values must be strictly increasing")
    return s, v


def _rms(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(r * r)))


# --- parabola -----------------------------------------------------------------


def _fit_parabola(s, v) -> FittedCurve:
    mid = 0.5 * (s[0] + s[-1])
    half = 0.5 * (s[-1] - s[0])
    t = (s - mid) / half
    A = np.stack([np.ones_like(t), t, t * t], axis=1)
    (b0, b1, b2), *_ = np.linalg.lstsq(A, v, rcond=None)
    # back to raw s
    c2 = b2 / half**2
    c1 = b1 / half - 2.0 * c2 * mid
    c0 = b0 - b1 * mid / half + b2 * mid**2 / half**2
    fn = lambda x: c0 + x * (c1 + x * c2)  # noqa: E731
    return FittedCurve(
        "parabola",
        {"c0": float(c0), "c1": float(c1), "c2": float(c2)},
        _rms(fn(s) - v),
        (float(s[0]), float(s[-1])),
        _fn=fn,
    )


# --- damped Gauss-Newton --------------------------------------------------------


def _gauss_newton(residual, jacobian, p0, scale, valid, max_iter=GN_MAX_ITER, rtol=GN_RTOL):
    """Minimise ``sum(residual(p)**2)``.

    Steps are halved until the cost decreases and ``valid(p)`` holds.  Returns
    ``(p, iterations, converged)``; convergence means the last accepted step is
    below ``rtol`` relative to ``max(|p|, scale)`` in every component, or that no
    halving of the step lowers the cost any more.
    """
    p = np.asarray(p0, dtype=float)
    r = residual(p)
    cost = float(r @ r)
    for it in range(1, max_iter + 1):
        J = jacobian(p)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        lam = 1.0
        accepted = False
        for _ in range(60):
            trial = p + lam * step
            if valid(trial):
                rt = residual(trial)
                ct = float(rt @ rt)
                if ct <= cost:
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            return p, it, True
        taken = trial - p
        p, r, cost = trial, rt, ct
        if np.all(np.abs(taken) <= rtol * np.maximum(np.abs(p), scale)):
            return p, it, True
    return p, max_iter, False


# --- circle ---------------------------------------------------------------------


def _circle_eval(p, s):
    s0, vtop, k = p
    u = s - s0
    q = np.sqrt(1.0 - (k * u) ** 2)
    return vtop - k * u * u / (1.0 + q)


def _circle_jac(p, s):
    s0, vtop, k = p
    u = s - s0
    q = np.sqrt(1.0 - (k * u) ** 2)
    d_s0 = k * u / q
    d_k = -(u * u / (1.0 + q) + (k * k) * u**4 / (q * (1.0 + q) ** 2))
    return np.stack([d_s0, np.ones_like(u), d_k], axis=1)


def _vertex_seed(par: FittedCurve):
    c0, c1, c2 = par.params["c0"], par.params["c1"], par.params["c2"]
    s0 = -c1 / (2.0 * c2)
    vtop = c0 - c1 * c1 / (4.0 * c2)
    return s0, vtop, c2


def _is_flat(par: FittedCurve, s) -> bool:
    L = s[-1] - s[0]
    return abs(par.params["c2"]) * L * L / 4.0 <= 1e-12 * max(1.0, L)


def _line_fallback(family, par, s, v, extra) -> FittedCurve:
    c0, c1 = par.params["c0"], par.params["c1"]
    fn = lambda x: c0 + c1 * x  # noqa: E731
    params = {"c0": c0, "c1": c1, **extra}
    return FittedCurve(family, params, _rms(fn(s) - v), par.domain, degenerate=True, _fn=fn)


def _fit_circle(s, v) -> FittedCurve:
    par = _fit_parabola(s, v)
    if _is_flat(par, s):
        return _line_fallback("circle", par, s, v, {"R": math.inf, "kappa": 0.0})
    s0, vtop, c2 = _vertex_seed(par)
    p0 = np.array([s0, vtop, -2.0 * c2])
    valid = lambda p: bool(np.all(np.abs(p[2] * (s - p[0])) < 1.0))  # noqa: E731
    if not valid(p0):
        # strongly curved data: seed from the algebraic circle instead
        A = np.stack([s, v, np.ones_like(s)], axis=1)
        (D, E, F), *_ = np.linalg.lstsq(A, -(s * s + v * v), rcond=None)
        cs, cv = -D / 2, -E / 2
        R = math.sqrt(max(cs * cs + cv * cv - F, 1e-300))
        up = c2 < 0
        p0 = np.array([cs, cv + R if up else cv - R, 1.0 / R if up else -1.0 / R])
        for _ in range(200):
            if valid(p0):
                break
            p0[2] *= 0.9
    L = s[-1] - s[0]
    scale = np.array([max(abs(s).max(), L), max(abs(v).max(), 1e-300), abs(p0[2])])
    p, it, ok = _gauss_newton(
        lambda p: _circle_eval(p, s) - v, lambda p: _circle_jac(p, s), p0, scale, valid
    )
    s0, vtop, k = (float(x) for x in p)
    fn = lambda x: _circle_eval(p, x)  # noqa: E731
    R = 1.0 / abs(k)
    params = {"s0": s0, "v0": vtop - 1.0 / k, "R": R, "kappa": k, "apex": vtop}
    fit = FittedCurve("circle", params, _rms(fn(s) - v), par.domain, iterations=it, _fn=fn)
    if not ok:
        raise NonConvergenceError(f"circle fit did not converge in {it} iterations", fit)
    return fit


# --- catenary -------------------------------------------------------------------


def _catenary_eval(p, s, sign):
    s0, vtop, a0 = p
    w = (s - s0) / a0
    return vtop + sign * a0 * 2.0 * np.sinh(0.5 * w) ** 2


def _catenary_jac(p, s, sign):
    s0, vtop, a0 = p
    w = (s - s0) / a0
    d_s0 = -sign * np.sinh(w)
    d_a0 = sign * (2.0 * np.sinh(0.5 * w) ** 2 - w * np.sinh(w))
    return np.stack([d_s0, np.ones_like(w), d_a0], axis=1)


def _fit_catenary(s, v) -> FittedCurve:
    par = _fit_parabola(s, v)
    if _is_flat(par, s):
        return _line_fallback("catenary", par, s, v, {"a0": math.inf})
    s0, vtop, c2 = _vertex_seed(par)
    # a0 (cosh(u/a0) - 1) ~ u^2 / (2 a0); an upward crown is the inverted cable
    sign = 1.0 if c2 > 0 else -1.0
    p0 = np.array([s0, vtop, 1.0 / (2.0 * abs(c2))])
    L = s[-1] - s[0]
    scale = np.array([max(abs(s).max(), L), max(abs(v).max(), 1e-300), p0[2]])
    valid = lambda p: bool(p[2] > 0 and np.all(np.abs((s - p[0]) / p[2]) < 700))  # noqa: E731
    p, it, ok = _gauss_newton(
        lambda p: _catenary_eval(p, s, sign) - v,
        lambda p: _catenary_jac(p, s, sign),
        p0,
        scale,
        valid,
    )
    s0, vtop, a0 = (float(x) for x in p)
    fn = lambda x: _catenary_eval(p, x, sign)  # noqa: E731
    params = {"a0": a0, "s0": s0, "v0": vtop - sign * a0, "sign": sign, "apex": vtop}
    fit = FittedCurve("catenary", params, _rms(fn(s) - v), par.domain, iterations=it, _fn=fn)
    if not ok:
        raise NonConvergenceError(f"catenary fit did not converge in {it} iterations", fit)
    return fit


_FITTERS = {"parabola": _fit_parabola, "circle": _fit_circle, "catenary": _fit_catenary}


def fit_curve(family: str, samples, v=None) -> FittedCurve:
    """Least-squares fit of one curve family.

    ``samples`` is either a sequence of ``(s, v)`` pairs or, when ``v`` is
    given, the array of ``s`` values.
    """
    if family not in _FITTERS:
        raise FitError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    s, v = _as_arrays(samples, v)
    need = MIN_SAMPLES[family]
    if len(s) < need:
        raise TooFewSamplesError(f"{family} fit needs at least {need} samples, got {len(s)}")
    return _FITTERS[family](s, v)


def compare_fits(samples, v=None, families: Sequence[str] = FAMILIES) -> dict[str, FittedCurve]:
    """Fit every family; ties are left to the caller."""
    s, v = _as_arrays(samples, v)
    return {fam: fit_curve(fam, s, v) for fam in families if len(s) >= MIN_SAMPLES[fam]}


def sagitta(curve) -> float:
    """Largest vertical gap between a curve and the chord joining its end values.

    Works for :class:`FittedCurve`, :class:`ParabolicArc`, or any callable
    carrying a ``domain`` attribute.
    """
    lo, hi = curve.domain
    if not hi > lo:
        raise ValueError("curve domain is degenerate")
    if isinstance(curve, ParabolicArc):
        return curve.sagitta()
    if isinstance(curve, FittedCurve) and curve.family == "parabola":
        return abs(curve.params["c2"]) * (hi - lo) ** 2 / 4.0
    v_lo, v_hi = float(curve(lo)), float(curve(hi))

    def gap(x):
        return abs(float(curve(x)) - (v_lo + (v_hi - v_lo) * (x - lo) / (hi - lo)))

    xs = np.linspace(lo, hi, 4097)
    gaps = np.abs(curve(xs) - (v_lo + (v_hi - v_lo) * (xs - lo) / (hi - lo)))
    i = int(np.argmax(gaps))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = minimize_scalar(lambda x: -gap(x), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * (hi - lo)})
    return max(float(gaps[i]), -float(res.fun))
