"""Gaussian volumes and Gaussian surface areas of the symmetric model sets.

The model hypersurfaces are round cylinders ``r S^k x R^(n-k)`` in
``R^(n+1)``.  Surface areas use the dimension-matched density

    gamma_n(x) = (2 pi)^(-n/2) exp(-|x|^2 / 2)

on the ``n``-dimensional surface, so a hyperplane through the origin has
Gaussian surface area exactly 1.  Volumes use ``gamma_(n+1)`` on the solid
cylinder ``B^(k+1)(0, r) x R^(n-k)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize, special

LOG_2PI = math.log(2.0 * math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver exhausts its iteration budget."""


class GaussianConvention(enum.Enum):
    """Exponent convention of the Gaussian density.

    ``HALF`` is ``(2 pi)^(-d/2) exp(-|x|^2/2)``, used everywhere except the
    minimal-cone calculus, which uses ``QUARTER``:
    ``(4 pi)^(-d/2) exp(-|x|^2/4)``.
    """

    HALF = 2.0
    QUARTER = 4.0

    def log_density(self, sq_norm, dim: int):
        c = self.value
        return -0.5 * dim * math.log(c * math.pi) - np.asarray(sq_norm) / c

    def density(self, sq_norm, dim: int):
        return np.exp(self.log_density(sq_norm, dim))


@dataclass(frozen=True)
class CylinderSpec:
    """The round cylinder ``r S^k x R^(n-k)`` inside ``R^(n+1)``.

    For ``k = 0`` this is the pair of hyperplanes ``{x_1 = +-r}``, i.e. the
    boundary of a symmetric slab.  ``r = 0`` is accepted only for ``k = 0``
    and then denotes a single hyperplane through the origin.
    """

    k: int
    n: int
    r: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"surface dimension n must be >= 1, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if not math.isfinite(self.r) or self.r < 0 or (self.r == 0 and self.k > 0):
            raise ValueError(f"radius must be positive, got r={self.r}")

    @property
    def euclidean_dims(self) -> int:
        return self.n - self.k


@dataclass(frozen=True)
class ProfileRow:
    c: float
    k: int
    n: int
    r: float
    gsa: float
    complement: bool
    is_min: bool = False


def log_unit_sphere_area(k: int) -> float:
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.log(2.0) + 0.5 * (k + 1) * math.log(math.pi) - math.lgamma(0.5 * (k + 1))


def unit_sphere_area(k: int) -> float:
    """Total k-dimensional measure of the unit sphere ``S^k`` in ``R^(k+1)``."""
    return math.exp(log_unit_sphere_area(k))


def log_gsa_cylinder(spec: CylinderSpec) -> float:
    k, r = spec.k, spec.r
    if k == 0 and r == 0:
        return 0.0
    return -0.5 * k * LOG_2PI + log_unit_sphere_area(k) + k * math.log(r) - 0.5 * r * r


def gsa_cylinder(spec: CylinderSpec) -> float:
    """Gaussian surface area of ``r S^k x R^(n-k)``.

    Equals ``(2 pi)^(-k/2) |S^k| r^k exp(-r^2/2)`` and does not depend on
    ``n``.  Evaluated in log space so large ``k`` does not overflow.
    """
    return math.exp(log_gsa_cylinder(spec))


def regularized_incomplete_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function ``P(a, x)``."""
    if math.isnan(a) or math.isnan(x):
        raise ValueError("arguments must not be NaN")
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if math.isinf(x):
        return 1.0
    return float(special.gammainc(a, x))


def gauss_volume_cylinder(spec: CylinderSpec) -> float:
    """Gaussian measure of the solid cylinder ``B^(k+1)(0, r) x R^(n-k)``.

    This is the chi-square probability ``P(chi^2_(k+1) <= r^2)``.
    """
    return regularized_incomplete_gamma(0.5 * (spec.k + 1), 0.5 * spec.r * spec.r)


def volume_derivative(spec: CylinderSpec) -> float:
    """``d/dr`` of the solid-cylinder volume.

    Under unit normal speed the volume changes by the integral of the
    ambient density ``gamma_(n+1)`` over the boundary, which is the Gaussian
    surface area divided by ``sqrt(2 pi)``.
    """
    if spec.k == 0 and spec.r == 0:
        # two coincident sheets
        return 2.0 / SQRT_2PI
    return math.exp(log_gsa_cylinder(spec)) / SQRT_2PI


def solve_radius_for_volume(k: int, n: int, c: float, tol: float = 1e-12,
                            max_iter: int = 200) -> float:
    """Radius ``r`` with ``gauss_volume_cylinder(k, n, r) == c``.

    Brent bracketing followed by Newton polish; the result matches the
    target volume to ``tol`` absolute.
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"target volume must lie in (0, 1), got {c}")

    def resid(r):
        return gauss_volume_cylinder(CylinderSpec(k, n, r)) - c

    hi = math.sqrt(k + 1.0)
    while resid(hi) < 0:
        hi *= 2.0
        if hi > 1e3:
            raise ConvergenceError(f"could not bracket volume {c} for k={k}")
    lo = 0.0
    try:
        r = optimize.brentq(lambda s: resid(s) if s > 0 else -c, lo, hi,
                            xtol=1e-15, rtol=4 * np.finfo(float).eps,
                            maxiter=max_iter)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc

    for _ in range(max_iter):
        f = resid(r)
        if abs(f) <= 0.1 * tol:
            break
        step = f / volume_derivative(CylinderSpec(k, n, r))
        r_new = r - step
        if not (0 < r_new < hi) or abs(step) < 1e-17 * r:
            break
        r = r_new
    if abs(resid(r)) > tol:
        raise ConvergenceError(f"volume residual {resid(r):.3e} exceeds {tol}")
    return r


def shrinker_gsa_sequence(k_max: int) -> np.ndarray:
    """``c_k``: Gaussian surface area of ``sqrt(k) S^k`` for ``k = 1..k_max``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    return np.array([gsa_cylinder(CylinderSpec(k, k, math.sqrt(k)))
                     for k in range(1, k_max + 1)])


def admissible(k: int, n: int, r: float) -> bool:
    """Radius window ``sqrt(n) <= r <= sqrt(n+2)`` for ``k >= 1``; slabs always pass."""
    if k == 0:
        return True
    return math.sqrt(n) <= r <= math.sqrt(n + 2)


def profile_table(c_grid: Iterable[float], k_max: int,
                  n_max: int | None = None) -> list[ProfileRow]:
    """Candidate symmetric sets of prescribed Gaussian volume.

    For every ``c`` the rows are: the slab (``k = 0``, reported with
    ``n = 0``) and its complement, then every ``1 <= k <= k_max``,
    ``k <= n <= n_max`` solid cylinder and complement whose boundary
    radius lies in the admissible window.  The row of least Gaussian surface
    area for each ``c`` carries ``is_min``.  Ordering is by
    ``(c, k, n, complement)``.
    """
    if n_max is None:
        n_max = k_max
    grid = sorted(float(c) for c in c_grid)
    if not grid:
        raise ValueError("empty volume grid")

    families = [(0, 0)] + [(k, n) for k in range(1, k_max + 1)
                           for n in range(k, n_max + 1)]
    rows: list[ProfileRow] = []
    for c in grid:
        block = []
        for k, n in families:
            for complement in (False, True):
                target = 1.0 - c if complement else c
                r = solve_radius_for_volume(k, max(n, 1), target)
                if not admissible(k, n, r):
                    continue
                gsa = gsa_cylinder(CylinderSpec(k, max(n, 1), r))
                block.append(ProfileRow(c, k, n, r, gsa, complement))
        best = min(range(len(block)), key=lambda i: block[i].gsa)
        block[best] = ProfileRow(**{**block[best].__dict__, "is_min": True})
        rows.extend(block)
    return rows


PROFILE_HEADER = ("c", "k", "n", "r", "gsa", "complement", "is_min")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def profile_csv_rows(rows: Sequence[ProfileRow]) -> list[list[str]]:
    out = []
    for row in rows:
        out.append([format_float(row.c), str(row.k), str(row.n),
                    format_float(row.r), format_float(row.gsa),
                    str(int(row.complement)), str(int(row.is_min))])
    return out
