import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from delegation_lab.numerics import (BracketError, DomainError, alpha_n, alpha_residual,
                                     beta_deficit, check_identity_exp, check_lemma_suite, exp_n,
                                     find_root_monotone, integrate, solve_alpha, solve_beta,
                                     z_curve)

# Reference values from scipy quad + brentq (see oracle helpers below).
BETA_REF = {3: 0.23095320463145175, 5: 0.32482251075350854, 10: 0.3413725218122556}
ALPHA_REF = 0.7454403321142358


def _quad(f, a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=500)[0]


def oracle_beta(n):
    return brentq(lambda b: _quad(lambda z: 1 / (1 + z + b * math.exp(z)), 0, n) - 1,
                  1e-6, 1.0, xtol=1e-15)


def oracle_curve(n):
    """Integrate z' = 1 + z + beta e^z, Z' = z directly in s."""
    beta = oracle_beta(n)

    def rhs(s, u):
        return [1 + u[0] + beta * math.exp(u[0]), u[0]]

    hit = lambda s, u: u[0] - n  # noqa: E731
    hit.terminal = True
    sol = solve_ivp(rhs, (0, 1.1), [0.0, 0.0], rtol=1e-11, atol=1e-12, dense_output=True,
                    events=hit, method="DOP853")
    return beta, sol


def test_integrate_and_root():
    assert integrate(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-9)
    assert integrate(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1, abs=1e-9)
    r = find_root_monotone(lambda v: v * v - 2.0, 0.0, 2.0)
    assert r == pytest.approx(math.sqrt(2.0), abs=1e-10)
    with pytest.raises(BracketError):
        find_root_monotone(lambda v: v + 1.0, 0.0, 1.0)


@pytest.mark.parametrize("n", [3, 5, 10])
def test_beta_matches_oracle(n):
    assert solve_beta(n) == pytest.approx(BETA_REF[n], abs=1e-10)
    assert solve_beta(n) == pytest.approx(oracle_beta(n), abs=1e-10)


def test_beta_domain():
    for bad in (2, 501):
        with pytest.raises(DomainError):
            solve_beta(bad)


def test_alpha_value_and_residual():
    a = solve_alpha()
    assert a == pytest.approx(ALPHA_REF, abs=1e-10)
    assert round(a, 3) == 0.745
    assert abs(alpha_residual(a)) < 1e-9
    # the residual changes sign across the root
    assert alpha_residual(a - 1e-4) * alpha_residual(a + 1e-4) < 0


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_beta_deficit_matches_subtraction(n):
    direct = (1 / solve_alpha() - 1) - solve_beta(n)
    assert beta_deficit(n) == pytest.approx(direct, rel=1e-8)


def test_alpha_n_definition():
    for n in (7, 50, 200):
        assert alpha_n(n) == pytest.approx((1 - 6 / n) / (1 + solve_beta(n)), rel=1e-14)


def test_exp_n_limits():
    lam = np.linspace(0, 2, 11)
    assert np.allclose(exp_n(lam, 10 ** 8), np.exp(lam), rtol=1e-6)
    assert exp_n(1.0, 1) == pytest.approx(2.0)


# beyond n ~ 30 the explicit ODE solver cannot step through the blow-up at s = 1
@pytest.mark.parametrize("n", [3, 10, 30])
def test_curve_matches_ode_oracle(n):
    beta, sol = oracle_curve(n)
    curve = z_curve(n)
    s_end = sol.t_events[0][0]
    assert s_end == pytest.approx(1.0, abs=1e-7)
    s = np.linspace(0, 0.98 * s_end, 60)
    z_ref, Z_ref = sol.sol(s)
    assert np.allclose(curve.z(s), z_ref, atol=1e-6)
    assert np.allclose(curve.Z(s), Z_ref, atol=1e-6)
    assert curve.Z_knots[-1] == pytest.approx(sol.y_events[0][0][1], abs=1e-6)


def test_curve_endpoints_and_monotone():
    c = z_curve(20)
    assert c.z(0.0) == 0.0
    assert c.z(1.0) == pytest.approx(20.0)
    s = np.linspace(0, 1, 5001)
    assert np.all(np.diff(c.z(s)) >= 0)
    assert np.all(np.diff(c.z(s, polish=False)) >= 0)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 120), s=st.floats(0.0, 1.0))
def test_curve_inverse_roundtrip(n, s):
    c = z_curve(n)
    z = float(c.z(s))
    assert 0.0 <= z <= n
    if 0 < s < c.s_knots[-1]:
        assert float(c.s_of_z(z)) == pytest.approx(s, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 200), r=st.floats(0.0, 0.999))
def test_h_constant_on_curve(n, r):
    c = z_curve(n)
    assert float(c.h(r)) == pytest.approx(1 + c.beta, rel=1e-5)


def test_identity_against_quadrature_oracle():
    n, q = 5, 1.7
    beta, sol = oracle_curve(n)
    s_end = sol.t_events[0][0]
    ref = _quad(lambda s: min(sol.sol(s)[0], q) * math.exp(-sol.sol(s)[1]), 0, s_end)
    lhs = (1 - math.exp(-q) - q * math.exp(-n)) / (1 + beta)
    assert ref == pytest.approx(lhs, abs=1e-6)
    assert check_identity_exp(n, q) < 1e-9


@pytest.mark.parametrize("n", [2, 3, 6, 7, 25])
def test_lemma_suite_passes(n):
    checks = check_lemma_suite(n)
    assert checks and all(c.passed for c in checks), [c for c in checks if not c.passed]
    names = {c.name for c in checks}
    assert ("alpha_n_bound" in names) == (n > 6)
    if n == 2:
        assert "Z_below_2" not in names


def test_lemma_suite_rejects_bad_n():
    with pytest.raises(DomainError):
        check_lemma_suite(1)
