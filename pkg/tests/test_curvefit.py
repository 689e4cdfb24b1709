import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from archrefine.curvefit import (
    FitError, ParabolicArc, TooFewSamplesError, compare_fits, fit_curve, load_samples, sagitta,
)

L = 30.9


def circle_arc(sag, L=L, n=101, R_sign=1.0):
    """Points on a circular crown with chord ``L`` and sagitta ``sag`` (ends at v = 0)."""
    R = (L * L / 4 + sag * sag) / (2 * sag)
    s = np.linspace(0, L, n)
    u = s - L / 2
    v = R_sign * (np.sqrt(R * R - u * u) - (R - sag))
    return s, v, R


def test_parabola_recovers_exact_coefficients():
    s = np.linspace(-3, 12, 25)
    v = 0.4 - 0.02 * s + 0.003 * s * s
    f = fit_curve("parabola", s, v)
    assert (f.params["c0"], f.params["c1"], f.params["c2"]) == pytest.approx((0.4, -0.02, 0.003), rel=1e-10)
    assert f.rms_residual < 1e-14
    arc = f.as_arc()
    assert arc.length == pytest.approx(15)
    assert arc(0.0) == pytest.approx(v[0]) and arc(15.0) == pytest.approx(v[-1])


def test_circle_recovers_radius_and_centre():
    s, v, R = circle_arc(0.06)
    f = fit_curve("circle", s, v)
    assert f.params["R"] == pytest.approx(R, rel=1e-9)
    assert f.params["s0"] == pytest.approx(L / 2, abs=1e-8)
    assert f.params["apex"] == pytest.approx(0.06, abs=1e-10)
    assert f.rms_residual < 1e-12
    assert f.iterations <= 100


def test_circle_sag_downwards():
    s, v, R = circle_arc(0.05, R_sign=-1.0)
    f = fit_curve("circle", s, v)
    assert f.params["R"] == pytest.approx(R, rel=1e-9)
    assert f.params["kappa"] < 0


def test_catenary_recovers_parameter():
    a0, s0 = 900.0, 14.0
    s = np.linspace(0, L, 60)
    v = 0.2 - a0 * (np.cosh((s - s0) / a0) - 1.0)
    f = fit_curve("catenary", s, v)
    assert f.params["a0"] == pytest.approx(a0, rel=1e-8)
    assert f.params["s0"] == pytest.approx(s0, abs=1e-7)
    assert f.params["sign"] == -1.0
    assert f.rms_residual < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 5e-3), st.floats(5.0, 80.0))
def test_circle_and_parabola_agree_on_shallow_arcs(ratio, chord):
    sag = ratio * chord
    s, v, _ = circle_arc(sag, L=chord)
    fits = compare_fits(s, v)
    # a circle through its own samples is reproduced; the parabola is close
    assert fits["circle"].rms_residual < 1e-9 * max(sag, 1.0)
    assert fits["parabola"].rms_residual < 1e-3 * sag
    assert sagitta(fits["circle"]) == pytest.approx(sag, rel=1e-6)


def test_flat_data_is_flagged_not_fitted():
    s = np.linspace(0, 10, 11)
    v = 0.3 + 0.01 * s
    for fam in ("circle", "catenary"):
        f = fit_curve(fam, s, v)
        assert f.degenerate
        assert f.rms_residual < 1e-15
        assert sagitta(f) < 1e-12


def test_sample_count_and_family_errors():
    with pytest.raises(TooFewSamplesError):
        fit_curve("catenary", [(0, 0), (1, 1), (2, 0)])
    with pytest.raises(TooFewSamplesError):
        fit_curve("parabola", [(0, 0), (1, 1)])
    with pytest.raises(FitError):
        fit_curve("spline", [(0, 0), (1, 1), (2, 0)])
    fits = compare_fits([(0, 0), (1, 0.5), (2, 0)])
    assert set(fits) == {"parabola", "circle"}


def test_sagitta_closed_form_against_dense_scan():
    arc = ParabolicArc(0.001, 0.009, -0.0003, L)
    t = np.linspace(0, L, 200001)
    chord = arc(0.0) + (arc(L) - arc(0.0)) * t / L
    assert arc.sagitta() == pytest.approx(np.max(np.abs(arc(t) - chord)), rel=1e-9)
    # generic path through a fitted non-parabola
    s, v, _ = circle_arc(0.07, n=41)
    f = fit_curve("circle", s, v)
    tt = np.linspace(0, L, 400001)
    gap = np.max(np.abs(f(tt) - (f(0.0) + (f(L) - f(0.0)) * tt / L)))
    assert sagitta(f) == pytest.approx(gap, rel=1e-9)


def test_arc_addition_is_pointwise():
    p, q = ParabolicArc(1, 2, 3, 4), ParabolicArc(-1, 0.5, 0.25, 4)
    t = np.linspace(0, 4, 9)
    assert np.allclose((p + q)(t), p(t) + q(t))
    with pytest.raises(ValueError):
        p + ParabolicArc(0, 0, 0, 5)
    assert ParabolicArc.flat(3.0).sagitta() == 0.0


def test_load_samples(tmp_path):
    good = tmp_path / "a.csv"
    good.write_text("s,v\n0,0\n1,0.5\n2,0\n")
    rows = load_samples(good)
    assert rows[1].s == 1.0 and rows[1].v == 0.5
    bad = tmp_path / "b.csv"
    bad.write_text("x,y\n0,0\n")
    with pytest.raises(FitError):
        load_samples(bad)


def test_unsorted_or_repeated_s_rejected():
    s, v, _ = circle_arc(0.06, n=31)
    idx = np.random.default_rng(3).permutation(len(s))
    with pytest.raises(FitError):
        fit_curve("circle", list(zip(s[idx], v[idx])))
    with pytest.raises(FitError):
        fit_curve("parabola", [(0, 0), (1, 1), (1, 2), (2, 0)])


def test_strongly_curved_circle_fit_stays_finite():
    theta = np.linspace(-1.2, 1.2, 15)
    s, v = 2.0 * np.sin(theta), 2.0 * np.cos(theta)  # R = 2, centre (0, 0)
    f = fit_curve("circle", s, v)
    assert f.params["R"] == pytest.approx(2.0, rel=1e-9)
    assert f.params["s0"] == pytest.approx(0.0, abs=1e-9)
    assert f.params["v0"] == pytest.approx(0.0, abs=1e-9)


def test_parabola_residual_is_shift_invariant_and_self_consistent():
    rng = np.random.default_rng(11)
    s = np.linspace(0, 20, 40)
    v = 0.01 * s - 0.0004 * s * s + rng.normal(0, 1e-3, s.size)
    f1, f2 = fit_curve("parabola", s, v), fit_curve("parabola", s, v + 3.7)
    assert f1.rms_residual == pytest.approx(f2.rms_residual, rel=1e-9)
    c = f1.params
    brute = np.sqrt(np.mean((c["c0"] + c["c1"] * s + c["c2"] * s * s - v) ** 2))
    assert f1.rms_residual == pytest.approx(brute, rel=1e-12)
    g1, g2 = fit_curve("circle", s, v), fit_curve("circle", s, v + 3.7)
    assert sagitta(g1) == pytest.approx(sagitta(g2), rel=1e-8)


def test_east_side_samples_give_its_coefficients():
    from archrefine.stylobate import parthenon

    arc = parthenon().boundary("east")
    s = np.linspace(0, arc.length, 20)
    f = fit_curve("parabola", s, arc(s))
    assert np.allclose([f.params[k] for k in ("c0", "c1", "c2")], arc.coeffs, rtol=1e-9, atol=0)


def test_shallow_parabola_circle_limit():
    s = np.linspace(0, 30.0, 50)
    v = 1e-5 * s * (30.0 - s)  # sagitta 2.25 mm over 30 m
    fits = compare_fits(s, v, families=("parabola", "circle"))
    assert abs(fits["circle"].rms_residual - fits["parabola"].rms_residual) < 1e-4


def test_paraboloid_seed_matches_vertex():
    # the Gauss-Newton seed comes from the parabola vertex; check the vertex algebra
    c0, c1, c2 = 0.001, 0.00888, -0.0002886
    s0 = -c1 / (2 * c2)
    vtop = c0 - c1 * c1 / (4 * c2)
    assert c0 + c1 * s0 + c2 * s0 * s0 == pytest.approx(vtop, rel=1e-12)
    assert math.isfinite(vtop)


def test_unit_parabola_example():
    s = np.linspace(0, 3, 7)
    f = fit_curve("parabola", s, s * s)
    assert [f.params[k] for k in ("c0", "c1", "c2")] == pytest.approx([0, 0, 1], abs=1e-12)
    assert f.rms_residual < 1e-12
