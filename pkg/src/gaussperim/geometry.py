"""Extrinsic geometry of the model cylinders and the pointwise identities it satisfies.

Sign convention: the unit normal ``N`` points away from the cylinder axis,
``H = div N = k / r`` and the principal entries of ``A`` on the spherical
directions are ``-1/r``, so that ``H = -trace(A)``.  With this orientation a
slab boundary at distance ``r`` has ``lambda = H - <x, N> = -r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .measure import CylinderSpec, gauss_volume_cylinder, gsa_cylinder, volume_derivative


@dataclass(frozen=True)
class ModelGeometry:
    H: float
    lam: float
    A_diag: tuple[float, ...]
    normA2: float
    A3trace: float
    x_dot_N: float


def geometry(spec: CylinderSpec) -> ModelGeometry:
    k, n, r = spec.k, spec.n, spec.r
    a = -1.0 / r if k else 0.0
    A_diag = (a,) * k + (0.0,) * (n - k)
    H = k / r if k else 0.0
    return ModelGeometry(
        H=H,
        lam=H - r,
        A_diag=A_diag,
        normA2=k / (r * r) if k else 0.0,
        A3trace=k * a ** 3,
        x_dot_N=r,
    )


def is_self_shrinker(spec: CylinderSpec, tol: float = 1e-12) -> bool:
    """True iff ``H = <x, N>`` on the model, i.e. ``r = sqrt(k)`` with ``k >= 1``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return abs(geometry(spec).lam) <= tol


def identity_residuals(spec: CylinderSpec) -> dict[str, float]:
    """Residuals of ``LH = 2H + lambda |A|^2`` and of the Simons identity.

    On a model ``H`` and ``|A|`` are constant and ``nabla A = 0``, so
    ``L`` acts on them by multiplication with ``1 + |A|^2`` and the Simons
    inequality is an equality.
    """
    g = geometry(spec)
    lhs_eigen = g.H * (1.0 + g.normA2)
    rhs_eigen = 2.0 * g.H + g.lam * g.normA2
    lhs_simons = g.normA2 * (1.0 + g.normA2)
    rhs_simons = 2.0 * g.normA2 - g.lam * g.A3trace
    return {"r_eigen": abs(lhs_eigen - rhs_eigen),
            "r_simons": abs(lhs_simons - rhs_simons)}


def identity_tolerance(spec: CylinderSpec) -> float:
    H = geometry(spec).H
    return 1e-12 * (1.0 + H * H)


def first_variation_consistency(spec: CylinderSpec, h: float = 1e-5) -> dict[str, float]:
    """Finite-difference check of the first variation along ``r -> r + s``.

    ``dVol_err`` compares the central difference of the volume with the
    boundary integral of the ambient density; ``dArea_err`` compares the
    central difference of the surface area with ``(H - <x,N>) * gsa``.  Both
    errors are relative to the value checked against.
    """
    r = spec.r
    if not 0 < h < r / 10:
        raise ValueError(f"step must lie in (0, r/10), got h={h}")
    if r + h == r or r - h == r:
        raise ValueError("finite-difference step underflows at this radius")
    plus = CylinderSpec(spec.k, spec.n, r + h)
    minus = CylinderSpec(spec.k, spec.n, r - h)

    dvol = (gauss_volume_cylinder(plus) - gauss_volume_cylinder(minus)) / (2 * h)
    dvol_exact = volume_derivative(spec)

    darea = (gsa_cylinder(plus) - gsa_cylinder(minus)) / (2 * h)
    g = geometry(spec)
    area = gsa_cylinder(spec)
    darea_exact = (g.H - g.x_dot_N) * area
    return {"dVol_err": abs(dvol - dvol_exact) / dvol_exact,
            "dArea_err": abs(darea - darea_exact) / area}


def model_grid():
    """The ``(k, n, r)`` grid on which the identities are checked."""
    for k in range(7):
        for n in range(max(k, 1), k + 4):
            for r in (0.3, 0.9, math.sqrt(max(k, 1)), 2.5):
                yield CylinderSpec(k, n, r)
