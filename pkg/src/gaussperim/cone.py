"""Radial calculus behind the instability of symmetric minimal cones.

All integrals here use the ``exp(-r^2/4)`` weight.  On a cone of dimension
``n`` the stability operator splits as ``r^-2 (L_link - (n-1) + L1)`` with
the radial part

    L1 = r^2 d^2/dr^2 + (n-1) r d/dr - (r^3/2) d/dr + r^2/2.

The radial test functions are all of the form ``a r + b / r``:
``g = r``, ``t = r + (4-2n)/r`` and ``h = r + (2-2n)/r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

from .measure import GaussianConvention

CONVENTION = GaussianConvention.QUARTER


@dataclass(frozen=True)
class RadialFunction:
    tag: str
    n: int

    def __post_init__(self):
        if self.tag not in ("G", "T", "Hh"):
            raise ValueError(f"unknown radial function {self.tag!r}")
        if self.n < 7:
            raise ValueError("minimal cones need n >= 7")

    @property
    def coeffs(self) -> tuple[int, int]:
        """``(a, b)`` with ``f(r) = a r + b / r``."""
        n = self.n
        return {"G": (1, 0), "T": (1, 4 - 2 * n), "Hh": (1, 2 - 2 * n)}[self.tag]

    def __call__(self, r):
        a, b = self.coeffs
        r = np.asarray(r, float)
        return a * r + b / r

    def d1(self, r):
        a, b = self.coeffs
        r = np.asarray(r, float)
        return a - b / r ** 2

    def d2(self, r):
        _, b = self.coeffs
        r = np.asarray(r, float)
        return 2 * b / r ** 3


def radial_moment(q: int) -> float:
    """``int_0^inf r^q exp(-r^2/4) dr = 2^q Gamma((q+1)/2)``."""
    if q < 0:
        raise ValueError("q must be >= 0")
    return math.exp(q * math.log(2.0) + math.lgamma(0.5 * (q + 1)))


def L1_apply(fn: RadialFunction, r):
    """Closed-form ``L1 fn`` from the exact derivatives of ``a r + b/r``."""
    n = fn.n
    r = np.asarray(r, float)
    return (r ** 2 * fn.d2(r) + (n - 1) * r * fn.d1(r)
            - 0.5 * r ** 3 * fn.d1(r) + 0.5 * r ** 2 * fn(r))


def L1_fd(f, r, n: int, step: float = 1e-4):
    """``L1`` by central differences, for functions without closed-form derivatives."""
    r = np.asarray(r, float)
    hs = step * r
    fp, f0, fm = f(r + hs), f(r), f(r - hs)
    d1 = (fp - fm) / (2 * hs)
    d2 = (fp - 2 * f0 + fm) / hs ** 2
    return r ** 2 * d2 + (n - 1) * r * d1 - 0.5 * r ** 3 * d1 + 0.5 * r ** 2 * f0


def _log_grid(points=200):
    return np.logspace(-3, 1, points)


def eigen_residual(fn: RadialFunction, points: int = 200) -> float:
    """Sup over ``r in [1e-3, 10]`` of the relative eigen-identity defect.

    ``G``: ``L1 g = (n-1) g``.  ``T``: ``L1 t = -(n-3) t``.
    ``Hh``: ``(L1 - (n-1)) h = -2(n-1) t``.  Each pointwise defect is divided
    by the largest term of the identity at that point.
    """
    n = fn.n
    r = _log_grid(points)
    lhs = L1_apply(fn, r)
    if fn.tag == "G":
        rhs = (n - 1) * fn(r)
    elif fn.tag == "T":
        rhs = -(n - 3) * fn(r)
    else:
        lhs = lhs - (n - 1) * fn(r)
        rhs = -2 * (n - 1) * RadialFunction("T", n)(r)
    scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs), np.abs(fn(r)), np.ones_like(r)])
    return float(np.max(np.abs(lhs - rhs) / scale))


def h_coefficients(n: int) -> tuple[Fraction, Fraction]:
    """Exact ``(alpha, beta)`` with ``h = alpha t - beta g``."""
    return Fraction(n - 1, n - 2), Fraction(1, n - 2)


def h_decomposition_exact(n: int) -> bool:
    """Coefficient-wise check of ``h = (n-1)/(n-2) t - 1/(n-2) g`` in rationals."""
    al, be = h_coefficients(n)
    t = RadialFunction("T", n).coeffs
    g = RadialFunction("G", n).coeffs
    h = RadialFunction("Hh", n).coeffs
    return all(al * ti - be * gi == hi for ti, gi, hi in zip(t, g, h))


class RadialQuadrature:
    """Nodes and weights for ``int_0^inf f(r) r^p exp(-r^2/4) dr``.

    Gauss-Legendre on ``[0, R]`` with the weight folded in; ``R`` is chosen
    so the neglected tail is below double precision for moderate degrees.
    Built without reference to the Gamma-function moments, so it can serve
    as an independent check on them.
    """

    def __init__(self, p: int = 0, points: int = 240, R: float = 40.0):
        if p < 0:
            raise ValueError("p must be >= 0")
        x, w = np.polynomial.legendre.leggauss(points)
        self.p = p
        self.nodes = 0.5 * R * (x + 1.0)
        self.weights = 0.5 * R * w * self.nodes ** p * np.exp(-self.nodes ** 2 / 4)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def moment(self, q: int) -> float:
        return self.integrate(lambda r: r ** q)


def orthogonality_residuals(n: int, quad: RadialQuadrature | None = None) -> dict[str, float]:
    """Relative residuals of ``int t g r^(n-3) w = 0`` and ``int h r^(n-1) w = 0``.

    The ``closed`` entries use Gamma-function moments, the ``quad`` entries
    numerical quadrature.
    """
    if n < 7:
        raise ValueError("minimal cones need n >= 7")
    M = radial_moment
    tg = M(n - 1) + (4 - 2 * n) * M(n - 3)
    h_vol = M(n) + (2 - 2 * n) * M(n - 2)
    quad = quad or RadialQuadrature()
    t, g, h = (RadialFunction(tag, n) for tag in ("T", "G", "Hh"))
    tg_q = quad.integrate(lambda r: t(r) * g(r) * r ** (n - 3))
    h_q = quad.integrate(lambda r: h(r) * r ** (n - 1))
    return {
        "tg": abs(tg) / M(n - 1),
        "h_vol": abs(h_vol) / M(n),
        "tg_quad": abs(tg_q) / M(n - 1),
        "h_vol_quad": abs(h_q) / M(n),
    }


def moment_recursion_residual(n: int) -> float:
    """Relative defect of ``int r^(n-1) w = 2(n-2) int r^(n-3) w``."""
    return abs(radial_moment(n - 1) - 2 * (n - 2) * radial_moment(n - 3)) / radial_moment(n - 1)


@dataclass(frozen=True)
class ConeInstability:
    n: int
    kappa: float
    T: float
    G: float
    Q: float
    lowerBound: float

    @property
    def secondVariationSign(self) -> str:
        if self.Q > 0:
            return "negative"
        if self.Q < 0:
            return "positive"
        return "zero"

    @property
    def strict(self) -> bool:
        return self.Q > self.lowerBound

    def to_json(self) -> dict:
        return {"n": self.n, "kappa": self.kappa, "T": self.T, "G": self.G,
                "Q": self.Q, "lowerBound": self.lowerBound,
                "secondVariationSign": self.secondVariationSign,
                "strict": self.strict}


def instability_functional(n: int, kappa: float) -> ConeInstability:
    """Radial part ``Q`` of ``int f L' f`` for ``f = phi(theta) h(r)``.

    ``phi`` is a link eigenfunction with eigenvalue ``kappa`` and unit norm.
    The second variation is ``-Q`` times a positive constant, so ``Q > 0``
    certifies instability.  ``lowerBound = (kappa - 2(n-1)) T``; ``Q``
    exceeds it whenever ``kappa >= 2(n-1)``.
    """
    if n < 7:
        raise ValueError("minimal cones need n >= 7")
    M = radial_moment
    c = 4 - 2 * n
    T = M(n - 1) + 2 * c * M(n - 3) + c * c * M(n - 5)
    G = M(n - 1)
    a = (n - 1) / (n - 2)
    Q = kappa * (a * a * T + G / (n - 2) ** 2) - 2 * (n - 1) ** 2 / (n - 2) * T
    return ConeInstability(n, float(kappa), T, G, Q, (kappa - 2 * (n - 1)) * T)


def instability_functional_quad(n: int, kappa: float,
                                quad: RadialQuadrature | None = None) -> float:
    """``Q`` assembled directly from ``int r^(n-3) h (kappa - (n-1) + L1) h w``."""
    quad = quad or RadialQuadrature()
    h = RadialFunction("Hh", n)
    return quad.integrate(
        lambda r: r ** (n - 3) * h(r) * (kappa * h(r) - (n - 1) * h(r) + L1_apply(h, r)))


def cone_operator_direct(f, r, n: int, link_norm2: float, step: float = 1e-4):
    """``L' f`` for a purely radial ``f`` on a cone, by central differences.

    ``L' = Delta - <x, grad>/2 + 1/2 + |A|^2`` with ``|A|^2 = link_norm2 / r^2``.
    """
    r = np.asarray(r, float)
    hs = step * r
    fp, f0, fm = f(r + hs), f(r), f(r - hs)
    d1 = (fp - fm) / (2 * hs)
    d2 = (fp - 2 * f0 + fm) / hs ** 2
    return d2 + (n - 1) / r * d1 - 0.5 * r * d1 + 0.5 * f0 + link_norm2 / r ** 2 * f0


def cone_operator_split(fn: RadialFunction, r, link_norm2: float):
    """``r^-2 (L_link - (n-1) + L1) f`` with ``L_link f = (|A_link|^2 + n - 1) f``."""
    n = fn.n
    r = np.asarray(r, float)
    return ((link_norm2 + n - 1) * fn(r) - (n - 1) * fn(r) + L1_apply(fn, r)) / r ** 2


def moment_gamma_check(q: int) -> float:
    """Cross-check against scipy's Gamma; relative difference."""
    ref = 2.0 ** q * special.gamma(0.5 * (q + 1))
    return abs(radial_moment(q) - ref) / ref
