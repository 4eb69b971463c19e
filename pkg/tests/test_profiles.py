import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpground import specfun
from gpground.profiles import (CriticalParams, algebraic_soliton, algebraic_soliton_prime,
                               emden_fowler_forward, emden_fowler_inverse, homoclinic,
                               homoclinic_energy, log_upsilon_h, parse_p, soliton_pde_residual,
                               upsilon_h)


def test_critical_params_parsing_and_derived_fields():
    p = CriticalParams("2/5")
    assert p.p == Fraction(2, 5) and p.is_exact
    assert p.d == 7.0
    assert p.alpha_p == pytest.approx(0.16 / 5.6, rel=1e-15)
    assert CriticalParams(1).alpha_p == 0.125
    assert CriticalParams("1/2").alpha_p == pytest.approx(1 / 24, rel=1e-15)
    assert CriticalParams("1/2").inverse_integer == 2
    assert CriticalParams("2/5").inverse_integer is None
    assert CriticalParams(0.5).compare_half() == 0
    assert CriticalParams(0.5 + 1e-13).compare_half() == 0
    assert CriticalParams("2/3").compare_half() == 1
    assert parse_p("0.25") == 0.25 and parse_p("3") == Fraction(3)
    assert p.label() == "2/5" and CriticalParams(1).label() == "1"
    assert CriticalParams(0.4).label() == "0.4"


@pytest.mark.parametrize("bad", [0, -0.5, 1.5, "3/2"])
def test_critical_params_range(bad):
    with pytest.raises(ValueError):
        CriticalParams(bad)


def test_soliton_examples():
    p1 = CriticalParams(1)
    assert algebraic_soliton(0.0, 3.7, p1) == 3.7
    assert algebraic_soliton(1.0, 1.0, p1) == pytest.approx(8 / 9, rel=1e-15)
    half = CriticalParams("1/2")
    r = 1e4
    assert algebraic_soliton(r, 1.0, half) * r ** 4 == pytest.approx(576.0, rel=1e-6)


def test_soliton_log_stable_at_extreme_amplitude():
    p = CriticalParams("2/5")
    v = algebraic_soliton(1.0, 1e300, p)
    assert 0.0 < v < math.inf


@pytest.mark.parametrize("p,b,r,tol", [(1, 1.0, 1.0, 1e-6), ("1/2", 2.0, 0.5, 1e-5)])
def test_soliton_pde_residual(p, b, r, tol):
    assert abs(soliton_pde_residual(r, b, CriticalParams(p), 1e-4)) <= tol


def test_soliton_pde_residual_is_second_order():
    params = CriticalParams("1/2")
    r1 = soliton_pde_residual(0.5, 2.0, params, 2e-3)
    r2 = soliton_pde_residual(0.5, 2.0, params, 1e-3)
    assert r1 / r2 == pytest.approx(4.0, rel=0.05)


def test_soliton_prime_matches_finite_difference():
    params = CriticalParams("2/5")
    r, b, h = 0.3, 10.0, 1e-6
    fd = (algebraic_soliton(r + h, b, params) - algebraic_soliton(r - h, b, params)) / (2 * h)
    assert algebraic_soliton_prime(r, b, params) == pytest.approx(fd, rel=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["1", "1/2", "2/5", "2/3"]), st.floats(1e-3, 1e3),
       st.floats(1e-4, 50), st.floats(1e-6, 5))
def test_soliton_positive_and_decreasing(p, b, r, dr):
    params = CriticalParams(p)
    u1 = algebraic_soliton(r, b, params)
    u2 = algebraic_soliton(r + dr, b, params)
    assert u1 > 0 and u2 > 0 and u2 <= u1
    assert algebraic_soliton_prime(r, b, params) < 0 or u1 < 1e-300


def test_homoclinic_examples():
    p1 = CriticalParams(1)
    assert homoclinic(0.0, p1)[0] == pytest.approx(8 / 9, rel=1e-15)
    for p in ("2/5", "2/3", 1):
        params = CriticalParams(p)
        t = -40.0
        assert homoclinic(t, params)[0] * math.exp(-t / params.pf) == pytest.approx(1.0, rel=1e-12)
        t = 40.0
        assert homoclinic(t, params)[0] * math.exp(t / params.pf) == pytest.approx(
            params.alpha_p ** (-1 / params.pf), rel=1e-12)


def test_energy_examples():
    assert homoclinic_energy(0.0, 0.0, CriticalParams(1)) == 0.0
    assert homoclinic_energy(1.0, 0.0, CriticalParams(1)) == pytest.approx(-0.25)


@pytest.mark.parametrize("p", ["2/5", "1/2", "2/3", 1])
def test_energy_vanishes_on_homoclinic(p):
    params = CriticalParams(p)
    for t in np.linspace(-20, 20, 100):
        th, thp = homoclinic(t, params)
        scale = max(th * th / params.pf ** 2, 1e-300)
        assert abs(homoclinic_energy(th, thp, params)) <= 1e-12 * max(1.0, scale)


@pytest.mark.parametrize("p", ["2/5", "1/2", "2/3", 1])
def test_homoclinic_ode_residual(p):
    params = CriticalParams(p)
    q = params.pf
    h = 1e-4
    for t in np.linspace(-5, 5, 41):
        th = [homoclinic(t + k * h, params)[0] for k in (-2, -1, 0, 1, 2)]
        # exact derivative matches a difference of the profile
        d1 = (th[0] - 8 * th[1] + 8 * th[3] - th[4]) / (12 * h)
        assert homoclinic(t, params)[1] == pytest.approx(d1, rel=1e-8, abs=1e-12)
        # second derivative from differencing the exact first derivative
        thp = [homoclinic(t + k * h, params)[1] for k in (-2, -1, 0, 1, 2)]
        d2 = (thp[0] - 8 * thp[1] + 8 * thp[3] - thp[4]) / (12 * h)
        terms = (d2, -th[2] / q ** 2, th[2] ** (2 * q + 1))
        assert abs(sum(terms)) / max(abs(x) for x in terms) <= 1e-9


@pytest.mark.parametrize("p,b", [(1, 2.0), ("1/2", 5.0), ("2/5", 10.0)])
def test_transform_conjugates_homoclinic_to_soliton(p, b):
    # Theta_h(t + p log b) = r^{1/p} U_b(r) with r = e^t
    params = CriticalParams(p)
    for r in np.geomspace(1e-3, 20, 60):
        t = math.log(r)
        th, thp = homoclinic(t + params.pf * math.log(b), params)
        rr, f, fp = emden_fowler_inverse(t, th, thp, params)
        assert rr == pytest.approx(r, rel=1e-15)
        assert f == pytest.approx(algebraic_soliton(r, b, params), rel=1e-12)
        # Psi' - Psi/p cancels near the core
        assert fp == pytest.approx(algebraic_soliton_prime(r, b, params), rel=1e-8)


def test_emden_fowler_examples():
    p1 = CriticalParams(1)
    assert emden_fowler_forward(1.0, 2.5, -0.3, p1)[:2] == (0.0, 2.5)
    assert emden_fowler_inverse(0.0, 2.5, 1.0, p1)[:2] == (1.0, 2.5)
    k = 1.7
    for r in (0.1, 1.0, 3.0):
        t, psi, psip = emden_fowler_forward(r, k, 0.0, p1)
        assert psi == pytest.approx(k * math.exp(t), rel=1e-15)
        assert psip == pytest.approx(k * math.exp(t), rel=1e-15)
    with pytest.raises(ValueError):
        emden_fowler_forward(0.0, 1.0, 0.0, p1)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["1", "1/2", "2/5", "2/3"]), st.floats(1e-3, 10),
       st.floats(-10, 10), st.floats(-10, 10))
def test_emden_fowler_round_trip(p, r, f, fp):
    params = CriticalParams(p)
    t, psi, psip = emden_fowler_forward(r, f, fp, params)
    r2, f2, fp2 = emden_fowler_inverse(t, psi, psip, params)
    assert r2 == pytest.approx(r, rel=1e-14)
    assert f2 == pytest.approx(f, rel=1e-14, abs=1e-14)
    assert fp2 == pytest.approx(fp, rel=1e-12, abs=1e-12 * (1 + abs(f) / r))
    t3, psi3, psip3 = emden_fowler_forward(*emden_fowler_inverse(0.3, 2.0, -1.0, params), params)
    assert (t3, psi3, psip3) == pytest.approx((0.3, 2.0, -1.0), rel=1e-14)


def test_upsilon_large_t():
    params = CriticalParams("2/3")
    lam = 1.0
    for t in (2.5, 3.0):
        ups = log_upsilon_h(t, lam, params)
        lead = -(1 - lam / 2) * t - 0.5 * math.exp(2 * t)
        assert math.exp(ups - lead) == pytest.approx(1.0, rel=0.05)
    assert upsilon_h(3.0, lam, params) == math.exp(log_upsilon_h(3.0, lam, params))


def test_upsilon_small_t():
    params = CriticalParams("2/3")
    lam = 1.0
    kp = params.kummer(lam)
    t = -6.0
    expect = specfun.gamma(1 / params.pf) / specfun.gamma(kp.alpha)
    assert upsilon_h(t, lam, params) * math.exp(t / params.pf) == pytest.approx(expect, rel=1e-3)


def test_upsilon_satisfies_linear_equation():
    # Upsilon'' = (1/p^2 - lam e^{2t} + e^{4t}) Upsilon
    params = CriticalParams("2/3")
    lam, t, h = 1.0, 0.0, 1e-3
    u = [upsilon_h(t + k * h, lam, params) for k in (-2, -1, 0, 1, 2)]
    d2 = (-u[0] + 16 * u[1] - 30 * u[2] + 16 * u[3] - u[4]) / (12 * h * h)
    rhs = (1 / params.pf ** 2 - lam * math.exp(2 * t) + math.exp(4 * t)) * u[2]
    assert abs(d2 - rhs) / abs(rhs) <= 1e-6


def test_upsilon_requires_lambda_below_d():
    with pytest.raises(ValueError):
        upsilon_h(0.0, 5.0, CriticalParams("2/3"))
