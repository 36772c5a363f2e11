import math

import pytest
from numpy.testing import assert_allclose

from gaussperim import geometry
from gaussperim.measure import CylinderSpec


def test_sphere_values():
    g = geometry.geometry(CylinderSpec(2, 2, 2.0))
    assert g.H == 1.0
    assert g.lam == -1.0
    assert g.A_diag == (-0.5, -0.5)
    assert_allclose(g.normA2, 0.5)
    assert_allclose(g.A3trace, -0.25)


def test_slab_lambda():
    g = geometry.geometry(CylinderSpec(0, 3, 0.7))
    assert g.H == 0.0
    assert g.lam == -0.7
    assert g.normA2 == 0.0


def test_mean_curvature_is_minus_trace():
    for spec in geometry.model_grid():
        g = geometry.geometry(spec)
        assert_allclose(g.H, -sum(g.A_diag), atol=1e-15)


@pytest.mark.parametrize("k", range(1, 8))
def test_shrinker_radius(k):
    assert geometry.is_self_shrinker(CylinderSpec(k, k + 1, math.sqrt(k)))
    assert not geometry.is_self_shrinker(CylinderSpec(k, k + 1, math.sqrt(k) * 1.01))


def test_identities_on_grid():
    for spec in geometry.model_grid():
        res = geometry.identity_residuals(spec)
        tol = geometry.identity_tolerance(spec)
        assert res["r_eigen"] <= tol, spec
        assert res["r_simons"] <= tol, spec


def test_first_variation_on_grid():
    for spec in geometry.model_grid():
        fv = geometry.first_variation_consistency(spec)
        assert fv["dVol_err"] <= 1e-7, spec
        assert fv["dArea_err"] <= 1e-7, spec


def test_first_variation_step_guard():
    with pytest.raises(ValueError):
        geometry.first_variation_consistency(CylinderSpec(1, 1, 0.3), h=0.1)
