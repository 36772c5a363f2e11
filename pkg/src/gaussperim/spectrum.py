"""Spectrum of the stability operator ``L`` on model cylinders.

On ``r S^k x R^(n-k)`` the operator ``L = Delta - <x, grad> + 1 + |A|^2``
separates into a spherical Laplacian on ``r S^k`` (eigenvalues
``-l(l+k-1)/r^2``) and the Ornstein-Uhlenbeck operator on ``R^(n-k)``
(Hermite eigenvalues ``-m``), so

    delta(l, m) = 1 + (k - l(l+k-1)) / r^2 - m.

Instability is certified two ways: directly, by an even volume-preserving
mode with ``delta > 0``, or after lifting to ``Sigma x R`` with the
perturbation ``(x_(n+2)^2 - 1) f``, which needs an even mode with
``delta > 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .measure import CylinderSpec

ELL_MAX = 12
M_MAX = 12

# E[(X^2 - 1)^2] for a standard normal X
LIFT_MOMENT = 2.0


class VerdictKind(str, enum.Enum):
    UNSTABLE_LIFT = "UNSTABLE_LIFT"
    UNSTABLE_DIRECT = "UNSTABLE_DIRECT"
    MARGINAL = "MARGINAL"
    NOT_DECIDED_STABLE = "NOT_DECIDED_STABLE"


@dataclass(frozen=True)
class ModeIndex:
    ell: int
    m: int
    multiplicity: int

    @property
    def parity_even(self) -> bool:
        return (self.ell + self.m) % 2 == 0

    @property
    def volume_orthogonal(self) -> bool:
        return (self.ell, self.m) != (0, 0)

    def lifted(self) -> "ModeIndex":
        """Mode of ``(x^2 - 1) f`` on ``Sigma x R``: one more Hermite factor of degree 2."""
        return ModeIndex(self.ell, self.m + 2, self.multiplicity)


@dataclass(frozen=True)
class StabilityVerdict:
    kind: VerdictKind
    witness: ModeIndex | None
    delta: float
    margin: float

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "ell": None if self.witness is None else self.witness.ell,
            "m": None if self.witness is None else self.witness.m,
            "delta": self.delta,
            "margin": self.margin,
        }


def harmonic_dimension(ell: int, k: int) -> int:
    """Dimension of degree-``ell`` spherical harmonics on ``S^k``."""
    if k == 0:
        return 1 if ell in (0, 1) else 0
    if ell == 0:
        return 1
    return math.comb(ell + k, k) - math.comb(ell + k - 2, k)


def hermite_dimension(m: int, dims: int) -> int:
    """Number of multi-indices of total degree ``m`` in ``dims`` variables."""
    if dims == 0:
        return 1 if m == 0 else 0
    return math.comb(m + dims - 1, dims - 1)


def _check_ell(spec: CylinderSpec, ell: int, m: int):
    if ell < 0 or m < 0:
        raise ValueError("mode indices must be nonnegative")
    if spec.k == 0 and ell > 1:
        raise ValueError("S^0 carries only ell in {0, 1}")


def mode_eigenvalue(spec: CylinderSpec, ell: int, m: int) -> float:
    _check_ell(spec, ell, m)
    k, r = spec.k, spec.r
    if k == 0:
        return 1.0 - m
    return 1.0 + (k - ell * (ell + k - 1)) / (r * r) - m


def mode_index(spec: CylinderSpec, ell: int, m: int) -> ModeIndex:
    _check_ell(spec, ell, m)
    mult = harmonic_dimension(ell, spec.k) * hermite_dimension(m, spec.euclidean_dims)
    return ModeIndex(ell, m, mult)


def enumerate_modes(spec: CylinderSpec, ell_max: int = ELL_MAX, m_max: int = M_MAX,
                    even: bool = False, volume_orthogonal: bool = False):
    """All existing modes below the cutoffs as ``(ModeIndex, delta)`` pairs.

    Sorted by ``delta`` descending, ties broken by ``(ell, m)``.  Modes of
    multiplicity zero (Hermite degree ``m > 0`` when ``n = k``) are skipped.
    """
    ells = range(min(ell_max, 1) + 1) if spec.k == 0 else range(ell_max + 1)
    out = []
    for ell in ells:
        for m in range(m_max + 1):
            mode = mode_index(spec, ell, m)
            if mode.multiplicity == 0:
                continue
            if even and not mode.parity_even:
                continue
            if volume_orthogonal and not mode.volume_orthogonal:
                continue
            out.append((mode, mode_eigenvalue(spec, ell, m)))
    out.sort(key=lambda p: (-p[1], p[0].ell, p[0].m))
    return out


def _check_tol(tol):
    if not 0 < tol < 0.1:
        raise ValueError("tol must lie in (0, 0.1)")


def classify_cylinder_lift(spec: CylinderSpec, tol: float = 1e-9) -> StabilityVerdict:
    """Verdict from lifting the top even mode to ``Sigma x R``.

    Unstable when the top even eigenvalue exceeds 2 by more than ``tol``;
    within ``tol`` of 2 the case is marginal (the shrinker radius).
    """
    _check_tol(tol)
    mode, delta = enumerate_modes(spec, even=True)[0]
    margin = delta - 2.0
    if margin > tol:
        kind = VerdictKind.UNSTABLE_LIFT
    elif abs(margin) <= tol:
        kind = VerdictKind.MARGINAL
    else:
        kind = VerdictKind.NOT_DECIDED_STABLE
    return StabilityVerdict(kind, mode, delta, margin)


def classify_direct(spec: CylinderSpec, tol: float = 1e-9) -> StabilityVerdict:
    """Verdict from even, volume-preserving modes of ``Sigma`` itself."""
    _check_tol(tol)
    modes = enumerate_modes(spec, even=True, volume_orthogonal=True)
    if not modes:
        return StabilityVerdict(VerdictKind.NOT_DECIDED_STABLE, None, -math.inf, -math.inf)
    mode, delta = modes[0]
    kind = VerdictKind.UNSTABLE_DIRECT if delta > tol else VerdictKind.NOT_DECIDED_STABLE
    return StabilityVerdict(kind, mode, delta, delta)


def classify(spec: CylinderSpec, tol: float = 1e-9) -> StabilityVerdict:
    """Combined verdict: direct instability first, then the lift."""
    direct = classify_direct(spec, tol)
    if direct.kind is VerdictKind.UNSTABLE_DIRECT:
        return direct
    return classify_cylinder_lift(spec, tol)


def lifted_form_value(delta: float, f_norm2: float) -> float:
    """Second variation of ``Sigma x R`` along ``(x^2 - 1) f`` when ``Lf = delta f``."""
    if f_norm2 <= 0:
        raise ValueError("f_norm2 must be positive")
    return -(delta - 2.0) * LIFT_MOMENT * f_norm2


def bisect_flip(pred: Callable[[float], bool], lo: float, hi: float,
                tol: float = 1e-10) -> float:
    """Locate the point where ``pred`` changes value on ``[lo, hi]``."""
    p_lo = pred(lo)
    if pred(hi) == p_lo:
        raise ValueError("predicate does not change on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == p_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def flip_points(k: int, n: int | None = None, tol: float = 1e-10,
                verdict_tol: float = 1e-13) -> dict[str, float]:
    """Radii where the lift and direct verdicts change, found by bisection.

    ``n`` defaults to ``k + 1`` so that the Hermite mode ``m = 2`` exists.
    """
    if k < 1:
        raise ValueError("flip points exist only for k >= 1")
    n = k + 1 if n is None else n
    rk, rk2 = math.sqrt(k), math.sqrt(k + 2)

    def lift_unstable(r):
        return classify_cylinder_lift(CylinderSpec(k, n, r), verdict_tol).kind \
            is VerdictKind.UNSTABLE_LIFT

    def direct_unstable(r):
        return classify_direct(CylinderSpec(k, n, r), verdict_tol).kind \
            is VerdictKind.UNSTABLE_DIRECT

    mid = 0.5 * (rk + rk2)
    return {
        "lift": bisect_flip(lift_unstable, 0.5 * rk, mid, tol),
        "direct_lower": bisect_flip(direct_unstable, 0.5 * rk, mid, tol),
        "direct_upper": bisect_flip(direct_unstable, mid, 2.0 * rk2, tol),
    }
