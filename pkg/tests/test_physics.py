import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from archrefine.physics import (
    BucklingCase, FilmFlow, RegimeError, buckling_report, drainage_time, film_state,
    mean_film_velocity,
)


def flow(theta_deg=0.2, h0=1e-3, L=30.0, **kw):
    return FilmFlow.from_degrees(theta_deg, h0, L, **kw)


def test_film_velocity_example():
    U, q = film_state(flow(), 1e-3)
    # g sin(theta) h^2 / (3 nu) evaluated by hand
    assert U == pytest.approx(9.81 * math.sin(math.radians(0.2)) * 1e-6 / 3e-6, rel=1e-14)
    assert U == pytest.approx(1.14e-2, rel=5e-3)
    assert q == U * 1e-3


def test_film_power_laws():
    f = flow(h0=2e-3)
    U1, q1 = film_state(f, 1e-3)
    U2, q2 = film_state(f, 2e-3)
    assert U2 == pytest.approx(4 * U1, rel=1e-14)
    assert q2 == pytest.approx(8 * q1, rel=1e-14)
    U0, q0 = film_state(f, 1e-12)
    assert U0 < 1e-15 and q0 < 1e-27
    Ua, _ = film_state(flow(0.1), 1e-3)
    Ub, _ = film_state(flow(0.3), 1e-3)
    assert Ub / Ua == pytest.approx(math.sin(math.radians(0.3)) / math.sin(math.radians(0.1)), rel=1e-14)


def test_drainage_time_example_and_identity():
    f = flow()
    t = drainage_time(f)
    assert t == pytest.approx(7.9e3, rel=0.01)
    assert t / 3600 == pytest.approx(2.2, rel=0.05)
    U, _ = film_state(f, f.h0)
    assert t == pytest.approx(3 * f.L / U, rel=1e-12)
    assert mean_film_velocity(f) == pytest.approx(U / 3, rel=1e-14)
    assert drainage_time(flow(h0=0.5e-3)) == pytest.approx(4 * t, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 2.5), st.floats(1e-4, 5e-3), st.floats(1, 100), st.floats(1.01, 3))
def test_drainage_monotone(theta, h0, L, k):
    base = drainage_time(flow(theta, h0, L))
    if theta * k < 2.8:
        assert drainage_time(flow(theta * k, h0, L)) < base
    assert drainage_time(flow(theta, h0 * k, L)) < base
    assert drainage_time(flow(theta, h0, L * k)) > base
    assert drainage_time(flow(theta, h0, L, nu=1e-6 * k)) > base


def test_film_regime_and_inputs():
    with pytest.raises(RegimeError, match="laminar"):
        flow(5.0)
    with pytest.raises(ValueError):
        flow(h0=0)
    with pytest.raises(ValueError):
        film_state(flow(), 2e-3)


def test_buckling_example():
    r = buckling_report(BucklingCase(40e9, 10.4, 0.75))
    assert r.P_cr == pytest.approx(0.907e9, rel=5e-3)
    assert r.sigma_cr == pytest.approx(513e6, rel=0.01)
    assert r.failure_mode == "crush"
    assert r.sigma_cr > 100e6
    # sigma_cr = pi^2 E r^2 / (4 L^2) evaluated independently
    assert r.sigma_cr == pytest.approx(math.pi ** 2 * 40e9 * 0.75 ** 2 / (4 * 10.4 ** 2), rel=1e-12)
    assert r.slenderness == pytest.approx(10.4 / 0.75)
    assert r.notes and "L/r" in r.notes[0]


def test_buckling_power_laws():
    base = buckling_report(BucklingCase(40e9, 10.4, 0.75)).P_cr
    assert buckling_report(BucklingCase(40e9, 20.8, 0.75)).P_cr == pytest.approx(base / 4, rel=1e-14)
    assert buckling_report(BucklingCase(40e9, 10.4, 1.5)).P_cr == pytest.approx(base * 16, rel=1e-14)
    slender = buckling_report(BucklingCase(40e9, 30.0, 0.5))
    assert slender.failure_mode == "buckle" and slender.notes == ()


@settings(max_examples=60, deadline=None)
@given(st.floats(1e6, 1e10), st.floats(1.01, 100))
def test_failure_mode_monotone_in_strength(crush, k):
    c = dict(E=40e9, L=10.4, r=0.75)
    lo = buckling_report(BucklingCase(sigma_crush=crush, **c)).failure_mode
    hi = buckling_report(BucklingCase(sigma_crush=crush * k, **c)).failure_mode
    assert not (lo == "buckle" and hi == "crush")
