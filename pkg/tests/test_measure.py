import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gaussperim import measure
from gaussperim.measure import CylinderSpec, GaussianConvention

NORMAL_Q75 = 0.6744897501960817


def test_unit_sphere_area_low_dims():
    assert_allclose(measure.unit_sphere_area(0), 2.0)
    assert_allclose(measure.unit_sphere_area(1), 2 * math.pi)
    assert_allclose(measure.unit_sphere_area(2), 4 * math.pi)
    assert_allclose(measure.unit_sphere_area(3), 2 * math.pi ** 2)


@pytest.mark.parametrize("n", [1, 2, 7, 50])
def test_hyperplane_has_unit_area(n):
    assert abs(measure.gsa_cylinder(CylinderSpec(0, n, 0.0)) - 1.0) <= 1e-14


def test_slab_area_is_two_densities():
    r = 0.8
    assert_allclose(measure.gsa_cylinder(CylinderSpec(0, 3, r)), 2 * math.exp(-r * r / 2), rtol=1e-15)


def test_shrinker_sequence_values():
    c = measure.shrinker_gsa_sequence(2)
    assert_allclose(c[0], math.sqrt(2 * math.pi / math.e), rtol=1e-14)
    assert_allclose(c[1], 4 / math.e, rtol=1e-14)


def test_shrinker_sequence_decreases_to_sqrt2():
    c = measure.shrinker_gsa_sequence(600)
    assert np.all(np.diff(c[:60]) < 0)
    assert abs(c[-1] - math.sqrt(2)) <= 0.01
    assert c[-1] > math.sqrt(2)


def test_circle_area_against_quadrature():
    # integrate the density along the circle directly
    r = 1.3
    phi = np.linspace(0, 2 * np.pi, 4001)[:-1]
    pts = r * np.column_stack([np.cos(phi), np.sin(phi)])
    dens = np.exp(-np.sum(pts ** 2, axis=1) / 2) / math.sqrt(2 * math.pi)
    quad = dens.sum() * r * (2 * np.pi / len(phi))
    assert_allclose(measure.gsa_cylinder(CylinderSpec(1, 1, r)), quad, rtol=1e-13)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(1, 8), r=st.floats(0.05, 6.0))
def test_area_independent_of_euclidean_factor(k, r):
    vals = [measure.gsa_cylinder(CylinderSpec(k, n, r)) for n in range(k, k + 6)]
    assert_allclose(vals, vals[0], rtol=1e-15)


@pytest.mark.parametrize("k", [1, 2, 5, 9])
def test_area_peaks_at_shrinker_radius(k):
    rs = np.linspace(0.1, 3 * math.sqrt(k), 400)
    g = np.array([measure.gsa_cylinder(CylinderSpec(k, k, r)) for r in rs])
    left, right = rs < math.sqrt(k), rs > math.sqrt(k)
    assert np.all(np.diff(g[left]) > 0)
    assert np.all(np.diff(g[right]) < 0)


def test_incomplete_gamma_half_is_erf():
    for x in [1e-6, 0.3, 2.0, 11.0]:
        assert_allclose(measure.regularized_incomplete_gamma(0.5, x), math.erf(math.sqrt(x)),
                        rtol=1e-14)


def test_incomplete_gamma_integer_closed_form():
    # P(a, x) = e^-x sum_{j>=a} x^j / j! for integer a (Poisson tail)
    for a in (1, 3, 6):
        for x in (0.5, 4.0):
            ref = math.exp(-x) * math.fsum(x ** j / math.factorial(j) for j in range(a, 80))
            assert_allclose(measure.regularized_incomplete_gamma(a, x), ref, rtol=1e-13)


def test_incomplete_gamma_matches_monte_carlo(rng):
    samples = 10 ** 6
    for _ in range(10):
        a, x = rng.uniform(0.3, 6.0), rng.uniform(0.2, 8.0)
        p_mc = np.mean(rng.gamma(a, size=samples) <= x)
        se = math.sqrt(max(p_mc * (1 - p_mc), 1e-12) / samples)
        assert abs(measure.regularized_incomplete_gamma(a, x) - p_mc) <= 3 * se + 1e-9


@pytest.mark.parametrize("a,x", [(0.0, 1.0), (1.0, -0.1), (math.nan, 1.0)])
def test_incomplete_gamma_rejects_bad_input(a, x):
    with pytest.raises(ValueError):
        measure.regularized_incomplete_gamma(a, x)


def test_slab_radius_is_normal_quantile():
    assert_allclose(measure.solve_radius_for_volume(0, 1, 0.5), NORMAL_Q75, rtol=1e-12)


@pytest.mark.parametrize("k,n", [(0, 1), (1, 1), (2, 4), (6, 6)])
@pytest.mark.parametrize("c", [0.01, 0.3, 0.77])
def test_radius_solver_round_trip(k, n, c):
    r = measure.solve_radius_for_volume(k, n, c)
    assert_allclose(measure.gauss_volume_cylinder(CylinderSpec(k, n, r)), c, rtol=1e-12)


@pytest.mark.parametrize("k", [0, 1, 3, 6])
@pytest.mark.parametrize("r", [0.4, 1.0, 2.2])
def test_volume_derivative_matches_finite_difference(k, r):
    h = 1e-5
    n = max(k, 1)
    fd = (measure.gauss_volume_cylinder(CylinderSpec(k, n, r + h))
          - measure.gauss_volume_cylinder(CylinderSpec(k, n, r - h))) / (2 * h)
    assert_allclose(fd, measure.volume_derivative(CylinderSpec(k, n, r)), rtol=1e-8)


def test_density_conventions():
    assert_allclose(GaussianConvention.HALF.density(0.0, 1), 1 / math.sqrt(2 * math.pi))
    assert_allclose(GaussianConvention.QUARTER.density(4.0, 1),
                    math.exp(-1) / math.sqrt(4 * math.pi))


def test_cylinder_validation():
    with pytest.raises(ValueError):
        CylinderSpec(3, 2, 1.0)
    with pytest.raises(ValueError):
        CylinderSpec(1, 1, 0.0)


def test_profile_table_rows():
    grid = np.linspace(0.01, 0.5, 50)
    rows = measure.profile_table(grid, 4)
    cs = sorted({r.c for r in rows})
    assert len(cs) == 50
    for c in cs:
        block = [r for r in rows if r.c == c]
        slabs = [r for r in block if r.k == 0]
        assert len(slabs) == 2
        mins = [r for r in block if r.is_min]
        assert len(mins) == 1
        assert mins[0].gsa == min(r.gsa for r in block)
        for r in block:
            if r.k:
                assert math.sqrt(r.n) <= r.r <= math.sqrt(r.n + 2)


def test_profile_half_volume_slab():
    rows = measure.profile_table([0.5], 2)
    slab = [r for r in rows if r.k == 0 and not r.complement][0]
    assert_allclose(slab.r, NORMAL_Q75, rtol=1e-12)
    assert_allclose(slab.gsa, 2 * math.exp(-slab.r ** 2 / 2), rtol=1e-14)
