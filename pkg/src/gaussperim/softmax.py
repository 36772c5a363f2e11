"""Smoothed maximum eigenvalue ``smax(A) = log(trace exp(beta A)) / beta``.

Everything is computed from one symmetric eigendecomposition with the top
eigenvalue shifted out before exponentiating, so large ``beta`` is safe.

The exact second derivative of ``t -> smax(A + tD)`` is evaluated with the
Daleckii-Krein divided differences of ``exp(beta x)``.  The commuting-case
expression ``beta [Tr(C D^2) - Tr(C D)^2]`` is an upper bound for it and
coincides with it when ``A`` and ``D`` commute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _sym(A, name="A") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    scale = max(np.abs(A).max(initial=0.0), 1e-300)
    if np.abs(A - A.T).max(initial=0.0) > 1e-12 * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def _eig(A, beta):
    if beta <= 0:
        raise ValueError("beta must be positive")
    try:
        lam, Q = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError("eigendecomposition failed") from exc
    w = np.exp(beta * (lam - lam[-1]))
    return lam, Q, w / w.sum()


def smax(A, beta: float) -> float:
    A = _sym(A)
    lam, _, _ = _eig(A, beta)
    top = lam[-1]
    return top + math.log(np.exp(beta * (lam - top)).sum()) / beta


def gibbs_weight(A, beta: float) -> np.ndarray:
    """``C = exp(beta A) / trace exp(beta A)``: symmetric, positive definite, trace one."""
    A = _sym(A)
    _, Q, p = _eig(A, beta)
    C = (Q * p) @ Q.T
    return 0.5 * (C + C.T)


def directional_derivative(A, D, beta: float) -> float:
    """``d/dt smax(A + tD)`` at ``t = 0``, equal to ``Tr(C D)``."""
    D = _sym(D, "D")
    return float(np.sum(gibbs_weight(A, beta) * D))


def second_derivative(A, D, beta: float) -> float:
    """Exact ``d^2/dt^2 smax(A + tD)`` at ``t = 0``."""
    A, D = _sym(A), _sym(D, "D")
    lam, Q, p = _eig(A, beta)
    Dt = Q.T @ D @ Q
    # divided differences of exp(beta x), normalized by trace exp(beta A)
    li, lj = lam[:, None], lam[None, :]
    pi, pj = p[:, None], p[None, :]
    gap = li - lj
    x = beta * gap
    safe_gap = np.where(gap == 0, 1.0, gap)
    with np.errstate(over="ignore", invalid="ignore"):
        dd = np.where(np.abs(x) > 0.5, (pi - pj) / safe_gap,
                      np.where(np.abs(x) > 1e-12, pj * np.expm1(x) / safe_gap,
                               beta * pj * (1.0 + 0.5 * x)))
    dd = 0.5 * (dd + dd.T)
    first = float(np.sum(p * np.diag(Dt)))
    return float(np.sum(Dt * Dt * dd) - beta * first * first)


def commuting_curvature_term(C, D, beta: float) -> float:
    """``beta Tr(C [D - I Tr(CD)]^2) = beta [Tr(C D^2) - Tr(C D)^2]``, always >= 0."""
    C = np.asarray(C, float)
    D = np.asarray(D, float)
    centered = D - np.eye(len(D)) * np.sum(C * D)
    return beta * float(np.sum(C * (centered @ centered)))


def extra_term(C, Ds, beta: float) -> float:
    """Sum over frame directions of the smoothing term; nonnegative."""
    return sum(commuting_curvature_term(C, D, beta) for D in Ds)


def fd_first(A, D, beta, t=None) -> float:
    A, D = _sym(A), _sym(D, "D")
    if t is None:
        t = 1e-6 * (1.0 + np.linalg.norm(A, 2))
    return (smax(A + t * D, beta) - smax(A - t * D, beta)) / (2 * t)


def fd_second(A, D, beta, t=1e-3) -> float:
    """Second central difference, Richardson-extrapolated over ``t`` and ``t/2``."""
    A, D = _sym(A), _sym(D, "D")
    f0 = smax(A, beta)

    def d2(s):
        return (smax(A + s * D, beta) - 2 * f0 + smax(A - s * D, beta)) / (s * s)

    return (4.0 * d2(0.5 * t) - d2(t)) / 3.0


@dataclass
class CheckReport:
    name: str
    passed: bool
    worst: float = 0.0
    tolerance: float = 0.0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "worst": self.worst,
                "tolerance": self.tolerance, "failures": self.failures[:5],
                **self.details}


def derivative_check(A, D, beta, rtol=1e-6) -> CheckReport:
    """Compare ``Tr(C D)`` with a central difference.

    The error is measured relative to ``max(|Tr(C D)|, ||D||_2)``, the scale
    at which the derivative lives.
    """
    exact = directional_derivative(A, D, beta)
    fd = fd_first(A, D, beta)
    scale = max(abs(exact), np.linalg.norm(_sym(D, "D"), 2), 1e-300)
    err = abs(fd - exact) / scale
    return CheckReport("directional_derivative", err <= rtol, err, rtol,
                       details={"exact": exact, "fd": fd})


def line_convexity_check(A, D, beta, samples=5, span=1.0, rtol=1e-5) -> CheckReport:
    """Second derivative along ``t -> A + tD`` at evenly spaced ``t``.

    At every sample the exact value must be nonnegative, bounded above by
    the commuting-case term, and match a Richardson second difference to
    ``rtol`` (relative to ``max(|f''|, beta ||D||_2^2 * 1e-3)``).
    """
    if samples < 3:
        raise ValueError("need at least 3 samples")
    A, D = _sym(A), _sym(D, "D")
    ts = np.linspace(-span, span, samples)
    dnorm2 = np.linalg.norm(D, 2) ** 2
    failures, worst, values = [], 0.0, []
    for t in ts:
        At = A + t * D
        exact = second_derivative(At, D, beta)
        bound = commuting_curvature_term(gibbs_weight(At, beta), D, beta)
        fd = fd_second(At, D, beta)
        scale = max(abs(exact), 1e-3 * beta * dnorm2, 1e-12)
        err = abs(fd - exact) / scale
        worst = max(worst, err)
        values.append(exact)
        slack = 1e-10 * (1.0 + abs(bound))
        if exact < -slack or exact > bound + slack or err > rtol:
            failures.append({"t": float(t), "exact": exact, "fd": fd, "bound": bound})
    return CheckReport("line_convexity", not failures, worst, rtol, failures,
                       {"min_second_derivative": float(min(values))})


@dataclass
class MatrixField:
    """Symmetric-matrix samples on a uniform grid with spacing ``h``.

    ``samples`` has shape ``grid_shape + (d, d)``.
    """

    samples: np.ndarray
    h: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, float)
        if self.samples.ndim < 3 or self.samples.shape[-1] != self.samples.shape[-2]:
            raise ValueError("samples must have shape grid + (d, d)")
        if min(self.grid_shape) < 3:
            raise ValueError("need at least 3 points per axis")
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if not np.allclose(self.samples, np.swapaxes(self.samples, -1, -2), rtol=0,
                           atol=1e-12 * max(np.abs(self.samples).max(), 1.0)):
            raise ValueError("samples must be symmetric")

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return self.samples.shape[:-2]

    @property
    def p(self) -> int:
        return len(self.grid_shape)

    @classmethod
    def from_function(cls, fn, p: int, points: int, h: float, origin=None):
        origin = np.zeros(p) if origin is None else np.asarray(origin, float)
        axes = [origin[i] + h * (np.arange(points) - (points - 1) / 2) for i in range(p)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        flat = [fn(x) for x in mesh.reshape(-1, p)]
        d = flat[0].shape[0]
        return cls(np.array(flat).reshape(mesh.shape[:-1] + (d, d)), h)


def _laplacian(values: np.ndarray, step: int, h: float, p: int) -> tuple[np.ndarray, tuple]:
    """Five-point-style Laplacian on the points with a full ``step``-wide stencil."""
    shape = values.shape[:p]
    core = tuple(slice(step, s - step) for s in shape)
    lap = np.zeros_like(values[core])
    for ax in range(p):
        fwd = list(core)
        bwd = list(core)
        fwd[ax] = slice(2 * step, shape[ax])
        bwd[ax] = slice(0, shape[ax] - 2 * step)
        lap += values[tuple(fwd)] - 2 * values[core] + values[tuple(bwd)]
    return lap / (step * h) ** 2, core


def field_laplacian_check(F: MatrixField, beta: float, safety: float = 10.0,
                          floor: float = 1e-9) -> CheckReport:
    """``Delta smax(A) >= Tr(C Delta A)`` at every interior grid point.

    Both sides use second differences.  The allowed deficit is ``c h^2``
    with ``c`` estimated from a Richardson comparison of the ``h`` and
    ``2h`` Laplacians (times ``safety``), plus a rounding floor scaled by
    ``max |smax| / h^2``.
    """
    p, h = F.p, F.h
    grid = F.grid_shape
    S = np.empty(grid)
    C = np.empty_like(F.samples)
    for idx in np.ndindex(*grid):
        S[idx] = smax(F.samples[idx], beta)
        C[idx] = gibbs_weight(F.samples[idx], beta)

    lap_s, core = _laplacian(S, 1, h, p)
    lap_A, _ = _laplacian(F.samples, 1, h, p)
    lhs = lap_s
    rhs = np.einsum("...ij,...ij->...", C[core], lap_A)

    rounding = floor + 64 * np.finfo(float).eps * np.abs(S).max() / h ** 2
    c_est = 0.0
    if min(grid) >= 5:
        lap_s2, core2 = _laplacian(S, 2, h, p)
        lap_A2, _ = _laplacian(F.samples, 2, h, p)
        inner = tuple(slice(1, -1) for _ in range(p))
        d_lhs = np.abs(lap_s2 - lap_s[inner]) / 3.0
        d_rhs = np.abs(np.einsum("...ij,...ij->...", C[core2], lap_A2 - lap_A[inner])) / 3.0
        c_est = float((d_lhs + d_rhs).max()) / h ** 2
    tol = safety * c_est * h ** 2 + rounding
    slack = lhs - rhs
    bad = np.argwhere(slack < -tol)
    failures = [{"index": [int(i) + 1 for i in b], "slack": float(slack[tuple(b)])}
                for b in bad]
    return CheckReport("field_laplacian", not failures, float(-slack.min()), float(tol),
                       failures, {"lhs": lhs, "rhs": rhs, "slack": slack})


def random_quadratic_field(rng: np.random.Generator, d: int = 4, p: int = 2,
                           points: int = 7, h: float = 1e-2, amp: float = 1.0) -> MatrixField:
    """``A(x) = A0 + sum x_i B_i + sum x_i x_j C_ij`` with random symmetric coefficients."""

    def rsym():
        M = rng.standard_normal((d, d))
        return amp * (M + M.T) / 2

    A0 = rsym()
    B = [rsym() for _ in range(p)]
    Cq = [[rsym() for _ in range(p)] for _ in range(p)]
    center = rng.uniform(-0.5, 0.5, size=p)

    def fn(x):
        out = A0 + sum(x[i] * B[i] for i in range(p))
        out = out + sum(x[i] * x[j] * Cq[i][j] for i in range(p) for j in range(p))
        return out

    return MatrixField.from_function(fn, p, points, h, origin=center)


def beta_limit_check(A, betas) -> CheckReport:
    """Sandwich ``amax <= smax <= amax + log(d)/beta``, the coarse bound
    ``smax <= log(d)/beta + ||A||_F``, and strict decrease in ``beta``."""
    A = _sym(A)
    betas = [float(b) for b in betas]
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("betas must be increasing")
    d = len(A)
    amax = float(np.linalg.eigvalsh(A)[-1])
    fro = float(np.linalg.norm(A, "fro"))
    vals = [smax(A, b) for b in betas]
    eps = 1e-12 * (1.0 + abs(amax))
    failures = []
    for b, v in zip(betas, vals):
        if not amax - eps <= v <= amax + math.log(d) / b + eps:
            failures.append({"beta": b, "bound": "sandwich", "smax": v})
        if v > math.log(d) / b + fro + eps:
            failures.append({"beta": b, "bound": "coarse", "smax": v})
    for (b1, v1), (b2, v2) in zip(zip(betas, vals), zip(betas[1:], vals[1:])):
        if not v2 < v1:
            failures.append({"beta": b2, "bound": "monotone", "smax": v2})
    return CheckReport("beta_limit", not failures, 0.0, eps, failures,
                       {"smax": vals, "amax": amax})


def random_sym(rng: np.random.Generator, d: int) -> np.ndarray:
    M = rng.standard_normal((d, d))
    return (M + M.T) / 2


def demo_report(d: int = 5, beta: float = 4.0, seed: int = 7, instances: int = 20) -> dict:
    """Run every check on seeded random instances; used by ``softmax-demo``."""
    rng = np.random.default_rng(seed)
    deriv_worst, conv_min, checks_ok = 0.0, math.inf, True
    trace_err, min_eig = 0.0, math.inf
    for _ in range(instances):
        A, D = random_sym(rng, d), random_sym(rng, d)
        rep = derivative_check(A, D, beta)
        deriv_worst = max(deriv_worst, rep.worst)
        lc = line_convexity_check(A, D, beta)
        conv_min = min(conv_min, lc.details["min_second_derivative"])
        C = gibbs_weight(A, beta)
        trace_err = max(trace_err, abs(np.trace(C) - 1.0))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(C)[0]))
        checks_ok &= rep.passed and lc.passed
    fields_ok, field_worst = True, -math.inf
    for _ in range(max(1, instances // 4)):
        F = random_quadratic_field(rng, d=d)
        rep = field_laplacian_check(F, beta)
        fields_ok &= rep.passed
        field_worst = max(field_worst, rep.worst)
    A = random_sym(rng, d)
    bl = beta_limit_check(A, [1, 2, 4, 8, 16])
    return {
        "d": d, "beta": beta, "seed": seed, "instances": instances,
        "smax_example": smax(A, beta),
        "derivative_worst_rel_err": deriv_worst,
        "line_convexity_min": conv_min,
        "gibbs_trace_err": trace_err,
        "gibbs_min_eigenvalue": min_eig,
        "field_laplacian_pass": bool(fields_ok),
        "field_laplacian_worst_deficit": field_worst,
        "beta_limit_pass": bl.passed,
        "pass": bool(checks_ok and fields_ok and bl.passed and trace_err <= 1e-12),
    }
