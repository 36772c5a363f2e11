import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gaussperim import cone
from gaussperim.cone import RadialFunction

SQRT_PI = math.sqrt(math.pi)


def test_moment_values():
    assert_allclose(cone.radial_moment(0), SQRT_PI, rtol=1e-15)
    assert_allclose(cone.radial_moment(6), 120 * SQRT_PI, rtol=1e-14)


@pytest.mark.parametrize("q", range(0, 40, 3))
def test_moment_against_gamma(q):
    assert cone.moment_gamma_check(q) <= 1e-13


@pytest.mark.parametrize("n", range(7, 13))
def test_moment_recursion(n):
    assert cone.moment_recursion_residual(n) <= 1e-12


@pytest.mark.parametrize("n", range(7, 13))
def test_quadrature_reproduces_moments(n):
    quad = cone.RadialQuadrature(p=n - 3)
    for q in range(17):
        assert_allclose(quad.moment(q), cone.radial_moment(q + n - 3), rtol=1e-10)


@pytest.mark.parametrize("n", [7, 9, 12])
@pytest.mark.parametrize("tag", ["G", "T", "Hh"])
def test_eigen_identities(n, tag):
    assert cone.eigen_residual(RadialFunction(tag, n)) <= 1e-12


@pytest.mark.parametrize("tag", ["G", "T", "Hh"])
def test_closed_form_operator_matches_differences(tag):
    fn = RadialFunction(tag, 8)
    r = np.linspace(0.5, 4.0, 9)
    assert_allclose(cone.L1_fd(fn, r, 8), cone.L1_apply(fn, r), rtol=1e-6)


@pytest.mark.parametrize("n", range(7, 13))
def test_orthogonality(n):
    res = cone.orthogonality_residuals(n)
    assert res["tg"] <= 1e-12 and res["h_vol"] <= 1e-12
    assert res["tg_quad"] <= 1e-8 and res["h_vol_quad"] <= 1e-8


def test_n7_orthogonality_by_hand():
    assert_allclose(cone.radial_moment(7), 768.0, rtol=1e-14)
    assert_allclose(12 * cone.radial_moment(5), 768.0, rtol=1e-14)


@pytest.mark.parametrize("n", range(7, 15))
def test_h_decomposition(n, rng):
    assert cone.h_decomposition_exact(n)
    al, be = cone.h_coefficients(n)
    assert al == Fraction(n - 1, n - 2)
    r = rng.uniform(0.1, 10, 20)
    t, g, h = (RadialFunction(tag, n)(r) for tag in ("T", "G", "Hh"))
    assert_allclose(float(al) * t - float(be) * g, h, rtol=1e-14, atol=1e-14)


def test_instability_n7_kappa12():
    res = cone.instability_functional(7, 12)
    assert_allclose(res.T, 80 * SQRT_PI, rtol=1e-13)
    assert_allclose(res.G, 120 * SQRT_PI, rtol=1e-13)
    assert_allclose(res.Q, 288 * SQRT_PI, rtol=1e-10)
    assert res.lowerBound == 0
    assert res.secondVariationSign == "negative"


def test_instability_n9_kappa16():
    res = cone.instability_functional(9, 16)
    assert_allclose(res.Q, 2304 * SQRT_PI, rtol=1e-12)
    assert res.Q > res.lowerBound >= 0


@pytest.mark.parametrize("n", [7, 8, 10, 12])
@pytest.mark.parametrize("scale", [1.0, 1.1, 1.5, 2.0, 4.0])
def test_above_threshold_is_unstable(n, scale):
    res = cone.instability_functional(n, scale * 2 * (n - 1))
    assert res.Q > res.lowerBound >= 0
    assert res.secondVariationSign == "negative"


def test_lower_bound_fails_far_below_threshold():
    res = cone.instability_functional(7, 0.0)
    assert res.Q < res.lowerBound
    assert res.secondVariationSign == "positive"


@settings(max_examples=40, deadline=None)
@given(n=st.integers(7, 14), k1=st.floats(-50, 200), dk=st.floats(0.01, 50))
def test_Q_affine_increasing(n, k1, dk):
    a = cone.instability_functional(n, k1)
    b = cone.instability_functional(n, k1 + dk)
    c = cone.instability_functional(n, k1 + 2 * dk)
    slope = ((n - 1) / (n - 2)) ** 2 * a.T + a.G / (n - 2) ** 2
    assert b.Q > a.Q
    assert_allclose(b.Q - a.Q, slope * dk, rtol=1e-9, atol=1e-9 * abs(a.Q))
    assert_allclose(c.Q - b.Q, b.Q - a.Q, rtol=1e-8, atol=1e-9 * abs(a.Q))


@pytest.mark.parametrize("n,kappa", [(7, 12.0), (8, 20.0), (11, 40.0)])
def test_Q_by_direct_quadrature(n, kappa):
    assert_allclose(cone.instability_functional_quad(n, kappa),
                    cone.instability_functional(n, kappa).Q, rtol=1e-10)


@pytest.mark.parametrize("tag", ["G", "T", "Hh"])
def test_operator_splits_into_radial_and_link_parts(tag):
    fn = RadialFunction(tag, 9)
    r = np.linspace(0.6, 3.0, 7)
    direct = [cone.cone_operator_direct(fn, r, 9, 5.0, step=s) for s in (1e-3, 5e-4)]
    split = cone.cone_operator_split(fn, r, 5.0)
    e1, e2 = (np.abs(d - split).max() for d in direct)
    assert e1 < 1e-4 * np.abs(split).max()
    if tag == "G":
        # differences are exact on linear functions, leaving only rounding
        assert e1 < 1e-8
    else:
        assert 3.0 < e1 / e2 < 5.0


def test_dimension_guard():
    with pytest.raises(ValueError):
        RadialFunction("T", 6)
    with pytest.raises(ValueError):
        cone.instability_functional(5, 10.0)
