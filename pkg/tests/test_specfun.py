import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpground import specfun
from gpground.profiles import CriticalParams
from gpground.specfun import KummerParams
from gpground.verify import certified_overlap, kummer_ode_residual

mp.mp.dps = 40


def rel(a, b):
    return abs(a - b) / abs(b)


# --- Gamma -------------------------------------------------------------------

def test_gamma_classical_values():
    assert rel(specfun.gamma(0.5), math.sqrt(math.pi)) < 1e-15
    assert specfun.gamma(5) == 24.0
    # reflection and recurrence by hand: Gamma(-1.5) = 4 sqrt(pi) / 3
    assert rel(specfun.gamma(-1.5), 4 * math.sqrt(math.pi) / 3) < 1e-14
    assert rel(specfun.gamma(-1.5), 2.3632718012073548) < 1e-14


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -17.0])
def test_gamma_poles(x):
    with pytest.raises(specfun.PoleError):
        specfun.gamma(x)
    assert specfun.rgamma(x) == 0.0


def test_gamma_against_multiprecision_on_stated_range():
    xs = np.concatenate([np.linspace(-50, 50, 2001), [1e-8, -1e-8, 49.99, -49.5 + 1e-9]])
    xs = xs[np.abs(xs - np.round(xs)) > 1e-9]
    worst = max(rel(specfun.gamma(x), float(mp.gamma(mp.mpf(x)))) for x in xs)
    assert worst <= 1e-13


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10).filter(lambda x: abs(x - round(x)) > 1e-6))
def test_gamma_reflection(x):
    assert abs(specfun.gamma(x) * specfun.gamma(1 - x) * float(mp.sinpi(x)) / math.pi - 1) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 30))
def test_gamma_recurrence(x):
    assert rel(specfun.gamma(x + 1), x * specfun.gamma(x)) <= 1e-13


def test_sinpi_exact_near_integers():
    for x in (2.00001, -7.5, 1e6 + 0.25, 3.0):
        assert specfun.sinpi(x) == pytest.approx(float(mp.sinpi(x)), rel=1e-15, abs=0)


def test_gamma_overflow_is_infinite():
    assert specfun.gamma(200.5) == math.inf


# --- digamma -------------------------------------------------------------------

def test_digamma_classical_values():
    euler = 0.5772156649015329
    assert rel(specfun.digamma(1), -euler) < 1e-15
    assert rel(specfun.digamma(2), 1 - euler) < 1e-15
    assert rel(specfun.digamma(0.5), -1.9635100260214235) < 1e-14


def test_digamma_against_finite_difference_of_log_gamma():
    # independent route: central difference of lgamma with Richardson
    x = 0.5
    d = lambda h: (math.lgamma(x + h) - math.lgamma(x - h)) / (2 * h)
    est = (4 * d(1e-3) - d(2e-3)) / 3
    assert rel(specfun.digamma(x), est) < 1e-9


def test_digamma_against_multiprecision():
    xs = np.concatenate([np.linspace(1e-3, 50, 3000), [1.4616321449683622, 1.46163214496]])
    worst = max(rel(specfun.digamma(x), float(mp.digamma(mp.mpf(x)))) for x in xs)
    assert worst <= 1e-12


def test_digamma_poles():
    with pytest.raises(specfun.PoleError):
        specfun.digamma(-3.0)


# --- Pochhammer ----------------------------------------------------------------

def test_pochhammer_examples():
    assert specfun.pochhammer(7.3, 0) == 1.0
    assert specfun.pochhammer(3, 4) == 360.0
    assert specfun.pochhammer(0.5, 3) == 0.5 * 1.5 * 2.5 == 1.875
    assert specfun.pochhammer(10.0, 400) == math.inf
    with pytest.raises(ValueError):
        specfun.pochhammer(1.0, -1)


# --- Kummer M -------------------------------------------------------------------

def test_kummer_examples():
    assert specfun.kummer_m(0.0, KummerParams(2.3, 1.7)) == 1.0
    assert rel(specfun.kummer_m(1.0, KummerParams(1.0, 1.0)), math.e) < 1e-15
    oracle = float(mp.hyp1f1(0.5, 1.5, -1))
    assert rel(specfun.kummer_m(-1.0, KummerParams(0.5, 1.5)), oracle) < 1e-14
    assert abs(specfun.kummer_m(-1.0, KummerParams(0.5, 1.5)) - 0.7468241328) < 1e-10


def test_kummer_against_multiprecision():
    rng = np.random.default_rng(1)
    for _ in range(100):
        a, b, z = rng.uniform(-3, 5), rng.uniform(0.1, 6), rng.uniform(-10, 30)
        ref = float(mp.hyp1f1(a, b, z))
        if abs(ref) < 1e-3:
            continue
        # the series loses digits to cancellation for negative z
        assert rel(specfun.kummer_m(z, KummerParams(a, b)), ref) < 1e-9


def test_kummer_nonconvergence_is_reported():
    with pytest.raises(specfun.ConvergenceError):
        specfun.kummer_m(1e5, KummerParams(1.0, 1.0))


# --- Tricomi U -------------------------------------------------------------------

def test_tricomi_beta_alpha_plus_one_is_power():
    kp = KummerParams(1.5, 2.5)
    assert rel(specfun.tricomi_u(4.0, kp), 0.125) < 1e-13
    for z in (0.3, 7.0, 45.0, 150.0):
        assert rel(specfun.tricomi_u(z, kp), z ** -1.5) < 1e-12
    assert rel(specfun.tricomi_u(45.0, kp, method="asymptotic"), 45.0 ** -1.5) < 1e-14


def test_tricomi_large_argument_leading_term():
    assert rel(specfun.tricomi_u(100.0, KummerParams(1.25, 2.5)), 100.0 ** -1.25) < 0.02


def test_tricomi_integer_beta_matches_symmetric_limit():
    a = 1.25
    exact = specfun.tricomi_u(1.0, KummerParams(a, 3))
    assert specfun.tricomi_branch(1.0, KummerParams(a, 3)) == "integer"
    lo = specfun.tricomi_u(1.0, KummerParams(a, 3 - 1e-8), method="connection")
    hi = specfun.tricomi_u(1.0, KummerParams(a, 3 + 1e-8), method="connection")
    assert rel(exact, 0.5 * (lo + hi)) < 1e-6


CASES = [(a, b) for a in (0.05, 0.3, 0.875, 1.25, 1.75, 3.0) for b in (1.3, 2, 2.5, 3, 3.5, 4)]


@pytest.mark.parametrize("a,b", CASES)
def test_tricomi_against_multiprecision(a, b):
    kp = KummerParams(a, b)
    zs = np.geomspace(0.05, 200, 60)
    worst = max(rel(specfun.tricomi_u(z, kp), float(mp.hyperu(a, b, z))) for z in zs)
    assert worst <= 1e-9


def test_tricomi_problem_parameters_against_multiprecision():
    # (alpha, beta) pairs reached by the solver
    for p in ("2/5", "1/2", "2/3", "1"):
        params = CriticalParams(p)
        for lam in np.linspace(0.01, params.d - 0.1, 7):
            kp = params.kummer(lam)
            for z in np.geomspace(0.05, 200, 25):
                ref = float(mp.hyperu(kp.alpha, kp.beta, z))
                assert rel(specfun.tricomi_u(z, kp), ref) <= 1e-9


def test_tricomi_near_integer_band_uses_integer_branch():
    # within 1e-6 of an integer the logarithmic series at the integer is used;
    # the result is that of the integer beta, off by O(|beta - n|)
    kp = KummerParams(1.25, 3 + 5e-7)
    assert specfun.tricomi_branch(1.0, kp) == "integer"
    assert specfun.tricomi_u(1.0, kp) == specfun.tricomi_u(1.0, KummerParams(1.25, 3))
    assert rel(specfun.tricomi_u(1.0, kp), float(mp.hyperu(1.25, 3 + 5e-7, 1.0))) < 1e-5


def test_exact_rational_p_gives_integer_beta():
    kp = CriticalParams("1/2").kummer(1.0)
    assert isinstance(kp.beta, int) and kp.beta == 3
    assert specfun.tricomi_branch(2.0, kp) == "integer"


@pytest.mark.parametrize("z,alpha", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -0.5)])
def test_tricomi_domain(z, alpha):
    with pytest.raises(ValueError):
        specfun.tricomi_u(z, KummerParams(alpha, 2.5))


def test_kummer_params_alpha_positive_below_d():
    params = CriticalParams("2/5")
    assert params.kummer(params.d - 1e-9).alpha > 0
    assert params.kummer(3.0).beta == 3.5


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 20), st.floats(0.1, 4), st.floats(0.2, 4))
def test_kummer_equation_residual(z, a, b):
    kp = KummerParams(a, b)
    assert kummer_ode_residual(specfun.kummer_m, z, kp) <= 1e-6
    assert kummer_ode_residual(specfun.tricomi_u, z, kp) <= 1e-6


@pytest.mark.parametrize("a", [0.05, 0.25, 0.5])
@pytest.mark.parametrize("b", [1.3, 2.5, 3.7])
def test_connection_and_asymptotic_agree_where_both_certified(a, b):
    kp = KummerParams(a, b)
    window = certified_overlap(kp)
    for z in window:
        u_a = specfun.tricomi_u(z, kp, method="connection")
        u_c = specfun.tricomi_u(z, kp, method="asymptotic")
        assert rel(u_a, u_c) <= 1e-8


def test_continuation_agrees_with_connection_and_asymptotic():
    kp = KummerParams(1.1, 1.3)   # no certified overlap exists for this pair
    assert certified_overlap(kp) == []
    for z in (2.0, 5.0):
        assert rel(specfun.tricomi_u(z, kp, method="continuation"),
                   specfun.tricomi_u(z, kp, method="connection")) < 1e-10
    z0 = specfun.asymptotic_crossover(kp) * 2
    assert rel(specfun.tricomi_u(z0, kp, method="continuation"),
               specfun.tricomi_u(z0, kp, method="asymptotic")) < 1e-12


@pytest.mark.parametrize("a,b", [(0.3, 2.5), (1.75, 3.5), (0.875, 2.5), (2.0, 3)])
def test_tricomi_strictly_decreasing(a, b):
    kp = KummerParams(a, b)
    vals = [specfun.tricomi_u(z, kp) for z in np.linspace(1, 100, 400)]
    assert all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))


def test_tricomi_derivative_and_log():
    kp = KummerParams(0.875, 3.5)
    z, h = 3.0, 1e-4
    fd = (specfun.tricomi_u(z + h, kp) - specfun.tricomi_u(z - h, kp)) / (2 * h)
    assert rel(specfun.tricomi_u_prime(z, kp), fd) < 1e-7
    assert rel(specfun.log_tricomi_u(900.0, kp), float(mp.log(mp.hyperu(0.875, 3.5, 900)))) < 1e-13


def test_forced_branch_names():
    with pytest.raises(ValueError):
        specfun.tricomi_u(1.0, KummerParams(1.0, 2.5), method="integer")
    with pytest.raises(ValueError):
        specfun.tricomi_u(1.0, KummerParams(1.0, 2.5), method="bogus")
