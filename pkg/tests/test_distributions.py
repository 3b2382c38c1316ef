import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from delegation_lab.distributions import (DiscreteJoint, Dist1D, ProductDist, RectMixture,
                                          expected_max, hard_instance_half, max_cdf,
                                          mech_value_half_instance, one_minus_inv_e_marginal,
                                          ratio_curve_phi)
from delegation_lab.numerics import DomainError


@st.composite
def mixtures(draw, atomless=False, discrete=False, max_atoms=3, max_segments=3):
    """Random mixture of atoms and uniform pieces on [0, 10]."""
    na = 0 if atomless else draw(st.integers(1 if discrete else 0, max_atoms))
    ns = 0 if discrete else draw(st.integers(1 if atomless or na == 0 else 0, max_segments))
    vals = draw(st.lists(st.integers(0, 100), min_size=na, max_size=na, unique=True))
    segs = []
    for _ in range(ns):
        lo = draw(st.integers(0, 90))
        segs.append((lo / 10, (lo + draw(st.integers(1, 10))) / 10))
    w = np.array(draw(st.lists(st.integers(1, 20), min_size=na + ns, max_size=na + ns)), float)
    w /= w.sum()
    atoms = tuple((v / 10, float(m)) for v, m in zip(vals, w[:na]))
    segments = tuple((lo, hi, float(m)) for (lo, hi), m in zip(segs, w[na:]))
    return Dist1D(atoms=atoms, segments=segments)


def test_basic_uniform_and_atoms():
    u = Dist1D.uniform()
    assert u.cdf(0.3) == pytest.approx(0.3)
    assert u.quantile(0.25) == pytest.approx(0.25)
    assert Dist1D.uniform(2, 4).quantile(0.5) == pytest.approx(3.0)
    d = Dist1D(atoms=((1, 0.9), (10, 0.1)))
    assert d.cdf(1.0) == pytest.approx(0.9)
    assert d.cdf_left(1.0) == 0.0
    assert d.quantile(0.5) == 1.0
    assert d.mean() == pytest.approx(1.9)
    mix = Dist1D(atoms=((2.0, 0.5),), segments=((0.0, 1.0, 0.5),))
    assert mix.cdf(1.5) == pytest.approx(0.5)


@pytest.mark.parametrize("kwargs", [
    dict(atoms=((1, 0.5),)),
    dict(atoms=((1, 0.5), (1, 0.5))),
    dict(segments=((1, 1, 1.0),)),
    dict(atoms=((1, -0.1), (2, 1.1))),
    dict(),
])
def test_invalid_laws(kwargs):
    with pytest.raises(ValueError):
        Dist1D(**kwargs)


def test_quantile_domain():
    with pytest.raises(DomainError):
        Dist1D.uniform().quantile(1.5)


@settings(max_examples=150, deadline=None)
@given(d=mixtures(), p=st.floats(0.0, 1.0))
def test_quantile_is_generalised_inverse(d, p):
    v = d.quantile(p)
    assert d.cdf(v) >= p - 1e-12
    assert d.cdf_left(v) <= p + 1e-12


@settings(max_examples=150, deadline=None)
@given(d=mixtures(atomless=True), a=st.floats(0.0, 0.999), x=st.floats(0.0, 10.0))
def test_upper_quantile_threshold_form(d, a, x):
    u = d.upper_quantile(a)
    fx = d.cdf(x)
    if abs(fx - a) > 1e-9:
        assert (x > u) == (fx > a)


def test_upper_quantile_edges():
    u = Dist1D.uniform()
    out = u.upper_quantile(np.array([-0.1, 0.0, 0.5, 1.0]))
    assert out[0] == -np.inf and out[1] == 0.0 and out[2] == pytest.approx(0.5) and out[3] == np.inf


@settings(max_examples=100, deadline=None)
@given(d=mixtures(), theta=st.floats(-1.0, 11.0), strict=st.booleans())
def test_tail_mean_against_quadrature(d, theta, strict):
    # E[X; X > theta] = theta P(X > theta) + int_theta^inf P(X > v) dv  for X >= 0 > -1
    lo = max(theta, 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pts = [v for v in d.breakpoints if v > lo]
        integral = quad(lambda v: 1 - d.cdf(v), lo, 10.0, points=pts[:50] or None, limit=200)[0]
    above = d.prob_above(lo, strict) if theta >= 0 else 1.0
    ref = lo * above + integral
    assert d.tail_mean(theta, strict) == pytest.approx(ref, abs=1e-7)


def test_expected_max_uniform_closed_form():
    u = Dist1D.uniform()
    for n in (1, 2, 5, 20):
        assert expected_max([u], [n]) == pytest.approx(n / (n + 1), abs=1e-12)


def _brute_max(ds, counts):
    draws = [d for d, c in zip(ds, counts) for _ in range(c)]
    total = 0.0
    for combo in itertools.product(*(d.atoms for d in draws)):
        total += max(v for v, _ in combo) * math.prod(m for _, m in combo)
    return total


@settings(max_examples=60, deadline=None)
@given(ds=st.lists(mixtures(discrete=True), min_size=1, max_size=3),
       counts=st.lists(st.integers(1, 2), min_size=3, max_size=3))
def test_expected_max_discrete_against_enumeration(ds, counts):
    counts = counts[:len(ds)]
    assert expected_max(ds, counts) == pytest.approx(_brute_max(ds, counts), abs=1e-10)


def test_expected_max_two_atoms():
    d = Dist1D(atoms=((1, 0.9), (10, 0.1)))
    assert expected_max([d, Dist1D.point(2)], [1, 1]) == pytest.approx(0.9 * 2 + 0.1 * 10)


@settings(max_examples=30, deadline=None)
@given(d=mixtures(), seed=st.integers(0, 2 ** 32 - 1))
def test_sampling_matches_cdf(d, seed):
    xs = d.sample(np.random.default_rng(seed), 4000)
    grid = np.linspace(-0.5, 10.5, 45)
    emp = (xs[:, None] <= grid).mean(axis=0)
    # Dvoretzky-Kiefer-Wolfowitz band at level 1e-6
    assert np.max(np.abs(emp - d.cdf(grid))) < math.sqrt(math.log(2e6) / (2 * 4000))


def test_joint_laws():
    rng = np.random.default_rng(3)
    p = ProductDist(Dist1D.uniform(), Dist1D.uniform(0, 2))
    x, y = p.sample(rng, (100, 3))
    assert x.shape == y.shape == (100, 3) and p.independent()
    r = RectMixture(((0, 1, 2, 3, 0.5), (5, 5, 0, 1, 0.5)))
    assert r.x_marginal().cdf(5.0) == pytest.approx(1.0)
    assert r.x_marginal().cdf_left(5.0) == pytest.approx(0.5)
    dj = DiscreteJoint(((1, 2, 0.25), (1, 3, 0.25), (4, 0, 0.5)))
    assert dj.x_marginal().cdf(1.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        RectMixture(((0, 1, 0, 1, 0.4),))


def _hard_oracle(H, n):
    """E[max] of the rectangle instance by piecewise quadrature of 1 - F^n."""
    w = 1 - 1 / (n * H)
    a, b = 1 - 1 / H, 1 + 1 / H

    def F(v):
        if v < a:
            return 0.0
        if v < b:
            return w * (v - a) / (b - a)
        if v < H:
            return w
        return min(1.0, w + (1 - w) * (v - H) / 2)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        parts = [(0, a), (a, b), (b, H), (H, H + 2)]
        return sum(quad(lambda v: 1 - F(v) ** n, lo, hi, limit=400, epsabs=1e-12)[0] for lo, hi in parts)


def test_hard_instance_half_benchmark():
    H, n = 1e4, 1000
    e = expected_max([hard_instance_half(H, n).x_marginal()], [n])
    assert e == pytest.approx(_hard_oracle(H, n), abs=1e-8)
    # 2 + O(1/H); the max over the first rectangle sits near 1 + 1/H, not 1
    assert abs(e - 2.0) <= 10 / H


def test_mech_value_half_instance():
    n = 1000
    p = 1 / n
    ref = 1 - (1 - p) ** n + (1 - p) ** (n - 1)
    assert mech_value_half_instance(p, n) == pytest.approx(ref)
    assert mech_value_half_instance(1 / n, n) == pytest.approx(1 + (1 - 1 / n) ** (n - 1) / n)
    ps = np.linspace(0, 1, 20001)
    assert max(mech_value_half_instance(float(q), n) for q in ps) <= mech_value_half_instance(p, n) + 1e-12


def test_ratio_curve_phi():
    assert ratio_curve_phi(1.0) == pytest.approx(1 - 1 / math.e, abs=1e-15)
    e = math.e
    for phi in (0.3, 2.0, 7.5):
        ref = (1 - math.exp(-phi)) * ((e - 2) / (e - 1) + 1 / ((e - 1) * phi))
        assert ratio_curve_phi(phi) == pytest.approx(ref, rel=1e-13)
    assert ratio_curve_phi(1e-9) == pytest.approx(1 / (e - 1), rel=1e-6)


def test_one_minus_inv_e_marginal():
    H, n = 50.0, 10
    d = one_minus_inv_e_marginal(H, n)
    p = 1 / ((math.e - 2) * n * H)
    assert d.prob_above(H + 1, strict=False) == pytest.approx(p)
    assert d.is_atomless


def test_max_cdf_left_limit():
    d = Dist1D(atoms=((1, 0.5), (2, 0.5)))
    assert max_cdf([d], [2], 2.0) == pytest.approx(1.0)
    assert max_cdf([d], [2], 2.0, left=True) == pytest.approx(0.25)
