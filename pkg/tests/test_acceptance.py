"""Acceptance criteria 1 to 9, one test each.

Every test records a ``criterion N: PASS|FAIL <detail>`` line.  The lines
are printed as they happen (visible with ``-s``) and again in the terminal
summary; ``python tests/test_acceptance.py`` runs the suite standalone.
"""

import math
import time

import numpy as np
import pytest

from gaussperim import cone, curves, geometry, measure, softmax, spectrum
from gaussperim.measure import CylinderSpec

RESULTS: list[str] = []


def record(number: int, ok: bool, detail: str):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_sqrt2_asymptotics():
    t0 = time.perf_counter()
    c = measure.shrinker_gsa_sequence(600)
    gap = abs(c[-1] - math.sqrt(2))
    decreasing = bool(np.all(np.diff(c[:60]) < 0))
    elapsed = time.perf_counter() - t0
    record(1, gap <= 0.01 and decreasing and elapsed < 1.0,
           f"|c_600 - sqrt2| = {gap:.3e} (tol 1e-2), decreasing k=1..60: {decreasing}, "
           f"{elapsed:.3f}s")


def test_criterion_2_hyperplane_normalization():
    worst = max(abs(measure.gsa_cylinder(CylinderSpec(0, n, 0.0)) - 1.0) for n in range(1, 51))
    record(2, worst <= 1e-14, f"max |gsa - 1| over n=1..50 = {worst:.3e} (tol 1e-14)")


def test_criterion_3_stability_thresholds():
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(1, 11):
        fp = spectrum.flip_points(k)
        worst = max(worst, abs(fp["lift"] - math.sqrt(k)),
                    abs(fp["direct_lower"] - math.sqrt(k)),
                    abs(fp["direct_upper"] - math.sqrt(k + 2)))
    elapsed = time.perf_counter() - t0
    record(3, worst <= 1e-9 and elapsed < 1.0,
           f"max flip-point error k=1..10 = {worst:.3e} (tol 1e-9), {elapsed:.3f}s")


def test_criterion_4_model_identities():
    worst_id, worst_fv = 0.0, 0.0
    for spec in geometry.model_grid():
        res = geometry.identity_residuals(spec)
        worst_id = max(worst_id, res["r_eigen"], res["r_simons"])
        fv = geometry.first_variation_consistency(spec)
        worst_fv = max(worst_fv, fv["dVol_err"], fv["dArea_err"])
    record(4, worst_id <= 1e-12 and worst_fv <= 1e-7,
           f"identity residual {worst_id:.3e} (tol 1e-12), "
           f"first variation {worst_fv:.3e} (tol 1e-7)")


def test_criterion_5_softmax_calculus():
    rng = np.random.default_rng(5)
    deriv, conv_min, conv_fail = 0.0, math.inf, 0
    for _ in range(100):
        A, D = softmax.random_sym(rng, 5), softmax.random_sym(rng, 5)
        deriv = max(deriv, softmax.derivative_check(A, D, 3.0).worst)
        lc = softmax.line_convexity_check(A, D, 3.0)
        conv_min = min(conv_min, lc.details["min_second_derivative"])
        conv_fail += len(lc.failures)
    field_fail = 0
    for _ in range(100):
        field_fail += len(softmax.field_laplacian_check(softmax.random_quadratic_field(rng),
                                                        2.0).failures)
    bound_fail = sum(len(softmax.beta_limit_check(softmax.random_sym(rng, 5),
                                                  [1, 2, 4, 8, 16]).failures)
                     for _ in range(20))
    ok = deriv <= 1e-6 and conv_min >= 0 and conv_fail == 0 and field_fail == 0 and bound_fail == 0
    record(5, ok, f"derivative rel err {deriv:.3e} (tol 1e-6), min line curvature {conv_min:.3e}, "
                  f"field violations {field_fail}, bound violations {bound_fail}")


def test_criterion_6_discrete_spectrum_convergence():
    exact = 2.0 - np.arange(6) ** 2
    errs = [np.abs(curves.circle_levels(curves.circle_curve(1.0, N), 6) - exact)
            for N in (128, 256, 512)]
    ratios = np.concatenate([errs[0][1:] / errs[1][1:], errs[1][1:] / errs[2][1:]])
    ratio_dev = float(np.abs(ratios - 4.0).max())
    worst_top = 0.0
    for r in (0.8, 1.0, 1.25):
        for N in (128, 256):
            top = curves.even_spectrum(curves.circle_curve(r, N), 1)[0][0]
            # O(N^-2) with unit constant
            worst_top = max(worst_top, abs(top - (1 + 1 / r ** 2)) * N ** 2)
    record(6, ratio_dev <= 0.5 and worst_top <= 1.0,
           f"Richardson ratios in [{ratios.min():.3f}, {ratios.max():.3f}] (4 +- 0.5), "
           f"top even error * N^2 = {worst_top:.3e} (<= 1)")


def test_criterion_7_gamma_curves():
    details, ok = [], True
    for m in (2, 3, 4, 6):
        c = curves.shoot_closed_curve(m)
        res = curves.shrinker_residual(c)
        nod = curves.rotation_nodal_count(c)
        good = (res <= 1e-6 and c.lam < 0 and c.m_fold == m and c.is_convex()
                and nod["nodalDomains"] == 2 * m)
        if m % 2 == 0 and m >= 6:
            good &= nod["unstableFlag"]
        ok &= bool(good)
        details.append(f"m={m} res={res:.1e} lam={c.lam:.4f} mFold={c.m_fold} "
                       f"nodal={nod['nodalDomains']} flag={nod['unstableFlag']}")
    record(7, ok, "; ".join(details))


def test_criterion_8_cone_calculus():
    quad = cone.RadialQuadrature()
    moment = max(cone.moment_recursion_residual(n) for n in range(7, 13))
    orth = [cone.orthogonality_residuals(n, quad) for n in range(7, 13)]
    closed = max(max(o["tg"], o["h_vol"]) for o in orth)
    quadr = max(max(o["tg_quad"], o["h_vol_quad"]) for o in orth)
    eig = max(cone.eigen_residual(cone.RadialFunction(tag, n))
              for n in range(7, 13) for tag in ("G", "T", "Hh"))
    q7 = cone.instability_functional(7, 12.0).Q
    q_err = abs(q7 - 288 * math.sqrt(math.pi)) / (288 * math.sqrt(math.pi))
    grid_bad = 0
    for n in range(7, 12):
        for scale in (1.0, 1.25, 1.5, 2.0):
            res = cone.instability_functional(n, scale * 2 * (n - 1))
            grid_bad += not (res.Q > res.lowerBound >= 0)
    ok = (moment <= 1e-12 and closed <= 1e-12 and quadr <= 1e-8 and eig <= 1e-12
          and q_err <= 1e-10 and grid_bad == 0)
    record(8, ok, f"moment {moment:.1e}, orth closed {closed:.1e}, orth quad {quadr:.1e}, "
                  f"eigen {eig:.1e}, Q(7,12) rel err {q_err:.1e}, grid failures {grid_bad}/20")


def test_criterion_9_integration_by_parts():
    rng = np.random.default_rng(9)
    shapes = [curves.circle_curve(1.0, 256), curves.circle_curve(0.7, 300)]
    shapes += [curves.shoot_closed_curve(m) for m in (2, 3, 4)]
    worst = max(curves.self_adjointness_residual(curves.assemble_operator(c), rng, pairs=20)
                for c in shapes)
    record(9, worst <= 1e-10, f"max weighted self-adjointness residual {worst:.3e} (tol 1e-10)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
