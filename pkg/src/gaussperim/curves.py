"""Closed planar lambda-shrinkers and their discrete stability operator.

A curve satisfies ``kappa = <x, N> + lambda`` with ``N`` the right-hand
normal of the direction of travel, so a counter-clockwise circle of radius
``r`` is a solution with ``lambda = 1/r - r``.  In arclength the equation is
the ODE

    x' = (cos theta, sin theta),    theta' = <x, N(theta)> + lambda,

``N(theta) = (sin theta, -cos theta)``.

The m-fold symmetric curves Gamma_m are found by shooting over one half
sector: start perpendicular to the x-axis at ``(rho, 0)`` and require the
path to meet the ray at angle ``pi/m`` perpendicularly.  Reflection and
rotation then assemble the closed curve.

The discrete operator ``L = Delta_s - <x, grad_s> + 1 + kappa^2`` is built
in flux form, ``(1/w) (w f')'`` with Gaussian weight ``w``, which makes it
exactly self-adjoint for the vertex-weighted inner product.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

log = logging.getLogger(__name__)

DIVERGENCE_RADIUS = 50.0
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class ShootingError(RuntimeError):
    """Shooting failed; ``code`` is NO_CONVERGENCE, NON_EMBEDDED or DIVERGED."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


# ---------------------------------------------------------------- integration

def integrate_shrinker(start, theta0: float, lam: float, step_count: int,
                       arc_step: float, record_every: int = 1) -> np.ndarray:
    """Classical RK4 in arclength.

    Returns an array of rows ``(s, x, y, theta)`` for the initial state and
    every ``record_every``-th step.
    """
    if arc_step <= 0:
        raise ValueError("arc_step must be positive")
    x, y = float(start[0]), float(start[1])
    th = float(theta0)
    h = float(arc_step)
    h2, h6 = 0.5 * h, h / 6.0
    sin, cos = math.sin, math.cos
    rows = [(0.0, x, y, th)]
    for i in range(1, step_count + 1):
        c1, s1 = cos(th), sin(th)
        k1 = x * s1 - y * c1 + lam
        t2 = th + h2 * k1
        c2, s2 = cos(t2), sin(t2)
        x2, y2 = x + h2 * c1, y + h2 * s1
        k2 = x2 * s2 - y2 * c2 + lam
        t3 = th + h2 * k2
        c3, s3 = cos(t3), sin(t3)
        x3, y3 = x + h2 * c2, y + h2 * s2
        k3 = x3 * s3 - y3 * c3 + lam
        t4 = th + h * k3
        c4, s4 = cos(t4), sin(t4)
        x4, y4 = x + h * c3, y + h * s3
        k4 = x4 * s4 - y4 * c4 + lam
        x += h6 * (c1 + 2 * c2 + 2 * c3 + c4)
        y += h6 * (s1 + 2 * s2 + 2 * s3 + s4)
        th += h6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if x * x + y * y > DIVERGENCE_RADIUS ** 2:
            raise ShootingError("DIVERGED", f"|x| exceeded {DIVERGENCE_RADIUS} at step {i}")
        if i % record_every == 0:
            rows.append((i * h, x, y, th))
    return np.array(rows)


def _polar_shoot(rho, lam: float, m: int, steps: int = 800):
    """Integrate in polar angle from 0 to pi/m for a batch of start radii.

    State is ``(r, psi, s)`` with ``psi = theta - phi`` and ``s`` arclength;
    valid while the curve stays star-shaped (``sin psi`` bounded away from
    0).  Returns the end mismatch ``cos psi``, the arclength travelled, the
    minimum curvature and a validity mask.
    """
    rho = np.atleast_1d(np.asarray(rho, float))
    h = (math.pi / m) / steps

    def rhs(r, psi):
        s = np.sin(psi)
        return r * np.cos(psi) / s, r * (r * s + lam) / s - 1.0, r / s

    r, psi = rho.copy(), np.full_like(rho, 0.5 * math.pi)
    arc = np.zeros_like(rho)
    ok = np.ones(rho.shape, bool)
    kmin = r + lam
    with np.errstate(all="ignore"):
        for _ in range(steps):
            a1, b1, c1 = rhs(r, psi)
            a2, b2, c2 = rhs(r + 0.5 * h * a1, psi + 0.5 * h * b1)
            a3, b3, c3 = rhs(r + 0.5 * h * a2, psi + 0.5 * h * b2)
            a4, b4, c4 = rhs(r + h * a3, psi + h * b3)
            r = r + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
            psi = psi + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
            arc = arc + h / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
            ok &= np.isfinite(r) & (r > 0) & (np.sin(psi) > 0.05)
            kmin = np.minimum(kmin, r * np.sin(psi) + lam)
    return np.where(ok, np.cos(psi), np.nan), arc, kmin, ok


def circle_radius(lam: float) -> float:
    """Radius of the centered circle solving the equation for ``lam``."""
    return 0.5 * (-lam + math.sqrt(lam * lam + 4.0))


def bifurcation_lambda(m: int) -> float:
    """``lambda`` where the circle's mode ``cos(m phi)`` enters the kernel (``r^2 = m^2 - 1``)."""
    r = math.sqrt(m * m - 1.0)
    return 1.0 / r - r


def default_lambda(m: int) -> float:
    # Gamma_2 branches toward less negative lambda, m >= 3 toward more negative
    lb = bifurcation_lambda(m)
    return 0.95 * lb if m == 2 else 1.005 * lb


def find_rho_bracket(m: int, lam: float, samples: int = 400):
    """Bracket of start radii (below the circle radius) for a convex non-circular solution."""
    rc = circle_radius(lam)
    rhos = np.linspace(0.5 * rc, (1 - 1e-3) * rc, samples)
    f, _, kmin, ok = _polar_shoot(rhos, lam, m)
    good = ok & (kmin > 0)
    brackets = [(rhos[i], rhos[i + 1]) for i in range(samples - 1)
                if good[i] and good[i + 1] and f[i] * f[i + 1] < 0]
    if not brackets:
        return None
    return max(brackets)  # the one nearest the circle


# ------------------------------------------------------------------- curves

@dataclass
class DiscreteCurve:
    """Closed polyline with vertex data for the shrinker analysis.

    ``s`` is the arclength parameter of each vertex and ``length`` the total
    length.  ``weights`` are ``gamma_1(x_i)`` times the arclength cell of
    vertex ``i``.
    """

    points: np.ndarray
    lam: float
    theta: np.ndarray
    kappa: np.ndarray
    s: np.ndarray
    length: float
    closure_gap: float = 0.0
    rho: float = float("nan")
    m: int = 0
    normals: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)
    m_fold: int = field(init=False)
    antipodal: bool = field(init=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, float)
        N = len(self.points)
        if N < 8:
            raise ValueError("need at least 8 vertices")
        self.normals = np.column_stack([np.sin(self.theta), -np.cos(self.theta)])
        ds = self.cell_lengths()
        if self.closure_gap > 1e-6 * self.length:
            raise ValueError(f"curve does not close: gap {self.closure_gap:.3e}")
        chords = np.linalg.norm(np.roll(self.points, -1, axis=0) - self.points, axis=1)
        if chords.min() < 0.5 * chords.mean() or chords.max() > 2 * chords.mean():
            raise ValueError("edge lengths are too uneven")
        dens = INV_SQRT_2PI * np.exp(-0.5 * np.sum(self.points ** 2, axis=1))
        self.weights = dens * 0.5 * (ds + np.roll(ds, 1))
        self.m_fold, self.antipodal = detect_symmetry(self.points)

    @property
    def n_points(self) -> int:
        return len(self.points)

    def edge_lengths(self) -> np.ndarray:
        """Arclength from vertex ``i`` to ``i+1`` (cyclic)."""
        return np.diff(np.append(self.s, self.length))

    def cell_lengths(self) -> np.ndarray:
        return self.edge_lengths()

    def x_dot_n(self) -> np.ndarray:
        return np.sum(self.points * self.normals, axis=1)

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def is_convex(self) -> bool:
        return bool(np.all(self.kappa > 0))

    def is_embedded(self) -> bool:
        """Star-shaped about the origin with monotone polar angle (hence embedded)."""
        phi = np.unwrap(np.arctan2(self.points[:, 1], self.points[:, 0]))
        return bool(np.all(np.diff(phi) > 0) and abs(phi[-1] - phi[0] - 2 * np.pi) < np.pi)


def circle_curve(r: float, n_points: int = 256) -> DiscreteCurve:
    """Counter-clockwise circle of radius ``r``; ``lambda = 1/r - r``."""
    if r <= 0:
        raise ValueError("radius must be positive")
    phi = 2 * np.pi * np.arange(n_points) / n_points
    pts = r * np.column_stack([np.cos(phi), np.sin(phi)])
    return DiscreteCurve(pts, 1.0 / r - r, phi + 0.5 * np.pi,
                         np.full(n_points, 1.0 / r), r * phi, 2 * np.pi * r,
                         rho=r, m=0)


def detect_symmetry(points, tol: float = 1e-6) -> tuple[int, bool]:
    """Largest ``j`` such that rotating by ``2 pi / j`` shifts the vertex list by ``N/j``.

    A sampled circle reports ``j = N``.  ``antipodal`` means
    ``x_(i + N/2) = -x_i``.
    """
    pts = np.asarray(points, float)
    N = len(pts)
    scale = tol * max(np.abs(pts).max(), 1.0)
    best = 1
    for j in range(2, N + 1):
        if N % j:
            continue
        a = 2 * np.pi / j
        R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        if np.abs(pts @ R.T - np.roll(pts, -N // j, axis=0)).max() <= scale:
            best = j
    antipodal = N % 2 == 0 and np.abs(np.roll(pts, -N // 2, axis=0) + pts).max() <= scale
    return best, bool(antipodal)


def _sector_end(rho, S, lam, m, steps):
    traj = integrate_shrinker((rho, 0.0), 0.5 * math.pi, lam, steps, S / steps,
                              record_every=steps)
    _, x, y, th = traj[-1]
    a = math.pi / m
    return np.array([-x * math.sin(a) + y * math.cos(a), math.cos(th - a)])


def _newton_sector(rho, S, lam, m, steps, max_iter=100, tol=1e-13):
    z = np.array([rho, S], float)
    for it in range(max_iter):
        F = _sector_end(z[0], z[1], lam, m, steps)
        if np.abs(F).max() < tol:
            return z, it
        J = np.empty((2, 2))
        for j in range(2):
            dz = np.zeros(2)
            dz[j] = 1e-7 * max(1.0, abs(z[j]))
            J[:, j] = (_sector_end(*(z + dz), lam, m, steps)
                       - _sector_end(*(z - dz), lam, m, steps)) / (2 * dz[j])
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError as exc:
            raise ShootingError("NO_CONVERGENCE", "singular Jacobian") from exc
        # damp steps that would move more than 10% of the unknowns
        damp = min(1.0, 0.1 * np.abs(z).min() / max(np.abs(step).max(), 1e-300))
        z = z - damp * step
        if np.abs(step).max() < 1e-15 * np.abs(z).max():
            F = _sector_end(z[0], z[1], lam, m, steps)
            if np.abs(F).max() < 1e3 * tol:
                return z, it
    raise ShootingError("NO_CONVERGENCE", f"Newton did not converge in {max_iter} steps")


def closed_points(n_points: int, m: int) -> int:
    """Vertex count rounded up to a multiple of ``2m`` so the symmetry is exact."""
    q = 2 * m
    return q * max(1, -(-n_points // q))


def shoot_closed_curve(m: int, rho_guess: float | None = None, lam: float | None = None,
                       n_points: int = 512, min_steps: int = 1024) -> DiscreteCurve:
    """Solve for the m-fold symmetric shrinker curve at fixed ``lambda``.

    Without ``rho_guess`` the start radius is bracketed by a polar-angle
    scan that skips the circle; when no non-circular convex solution exists
    the circle itself is returned.  The sector is then solved by Newton on
    ``(rho, S)`` (start radius, sector arclength) with the arclength RK4.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    lam = default_lambda(m) if lam is None else float(lam)
    if rho_guess is None:
        br = find_rho_bracket(m, lam)
        if br is None:
            log.info("no non-circular branch for m=%d, lambda=%g; using the circle", m, lam)
            rho_guess = circle_radius(lam)
        else:
            rho_guess = optimize.brentq(
                lambda r: _polar_shoot(r, lam, m, steps=2000)[0][0], *br, xtol=1e-13)
    S_guess = float(_polar_shoot(rho_guess, lam, m, steps=2000)[1][0])
    if not math.isfinite(S_guess):
        raise ShootingError("NON_EMBEDDED", "start radius leaves the star-shaped regime")

    N = closed_points(n_points, m)
    K = N // (2 * m)
    sub = max(1, -(-min_steps // K))
    steps = K * sub
    alpha = math.pi / m
    (rho, S), _ = _newton_sector(rho_guess, S_guess, lam, m, steps)

    half = integrate_shrinker((rho, 0.0), 0.5 * math.pi, lam, steps, S / steps,
                              record_every=sub)
    s_half, xy_half, th_half = half[:, 0], half[:, 1:3], half[:, 3]
    # reflect across the ray at angle alpha, traversed backwards
    e = np.array([math.cos(alpha), math.sin(alpha)])
    refl = 2 * np.outer(xy_half[:K][::-1] @ e, e) - xy_half[:K][::-1]
    sector_xy = np.vstack([xy_half[:K], xy_half[K:K + 1], refl[:-1]])
    sector_th = np.concatenate([th_half[:K], th_half[K:K + 1],
                                (2 * alpha - th_half[:K][::-1] + np.pi)[:-1]])
    sector_s = np.concatenate([s_half[:K + 1], 2 * S - s_half[:K][::-1][:-1]])

    pts, ths, ss = [], [], []
    for j in range(m):
        a = 2 * alpha * j
        R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        pts.append(sector_xy @ R.T)
        ths.append(sector_th + a)
        ss.append(sector_s + 2 * S * j)
    pts = np.vstack(pts)
    theta = np.concatenate(ths)
    s = np.concatenate(ss)
    # the reflection of the start point is where the next sector begins
    end_pt = (2 * (xy_half[0] @ e) * e - xy_half[0])
    a = 2 * alpha * (m - 1)
    R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    gap = float(np.linalg.norm(end_pt @ R.T - pts[0]))

    kappa = np.sum(pts * np.column_stack([np.sin(theta), -np.cos(theta)]), axis=1) + lam
    curve = DiscreteCurve(pts, lam, theta, kappa, s, 2 * m * S, closure_gap=gap,
                          rho=rho, m=m)
    if not curve.is_embedded():
        raise ShootingError("NON_EMBEDDED", "assembled curve self-intersects")
    return curve


# ------------------------------------------------------------- diagnostics

def spectral_derivative(values: np.ndarray, length: float) -> np.ndarray:
    """Derivative of periodic samples on a uniform grid of period ``length``."""
    N = len(values)
    k = np.fft.fftfreq(N, d=length / N) * 2 * np.pi
    spec = np.fft.fft(values) * 1j * k
    if N % 2 == 0:
        spec[N // 2] = 0.0
    return np.real(np.fft.ifft(spec))


def _uniform(curve: DiscreteCurve) -> bool:
    ds = curve.edge_lengths()
    return bool(np.allclose(ds, ds.mean(), rtol=1e-9))


def geometric_curvature(curve: DiscreteCurve) -> np.ndarray:
    """Curvature as ``d theta / ds`` by spectral differentiation of the tangent angle."""
    if not _uniform(curve):
        raise ValueError("spectral curvature needs uniform arclength samples")
    th = np.unwrap(curve.theta)
    L = curve.length
    turning = 2 * np.pi * curve.s / L
    return spectral_derivative(th - th[0] - turning, L) + 2 * np.pi / L


def shrinker_residual(curve: DiscreteCurve) -> float:
    """``max_i |kappa_i - <x_i, N_i> - lambda|`` with spectrally computed curvature."""
    k = geometric_curvature(curve)
    return float(np.abs(k - curve.x_dot_n() - curve.lam).max())


def recover_lambda(curve: DiscreteCurve) -> tuple[float, float]:
    """Least-squares ``lambda`` from ``kappa - <x, N>`` and its standard deviation."""
    d = geometric_curvature(curve) - curve.x_dot_n()
    return float(d.mean()), float(d.std())


def gradient_identity_residual(curve: DiscreteCurve) -> float:
    """For curves the gradient inequality ``2|grad |A||^2 <= |grad A|^2 + |grad H|^2``
    is an identity wherever ``kappa > 0``; returns its largest defect."""
    k = geometric_curvature(curve)
    dk = spectral_derivative(k, curve.length)
    dabs = spectral_derivative(np.abs(k), curve.length)
    return float(np.abs(2 * dabs ** 2 - (dk ** 2 + dk ** 2)).max())


# ---------------------------------------------------------------- operator

@dataclass
class DiscreteOperator:
    """``L`` as ``W^-1 M`` with ``M`` symmetric and ``W`` the vertex weights."""

    M: np.ndarray
    W: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.M / self.W[:, None]

    def apply(self, f) -> np.ndarray:
        return (self.M @ np.asarray(f, float)) / self.W

    def form(self, f, g) -> float:
        """``<f, L g>_W``."""
        return float(np.asarray(f, float) @ (self.M @ np.asarray(g, float)))

    def inner(self, f, g) -> float:
        return float(np.sum(np.asarray(f) * np.asarray(g) * self.W))

    def eigenvalues(self) -> np.ndarray:
        """All eigenvalues, descending."""
        return linalg.eigh(self.M, np.diag(self.W), eigvals_only=True)[::-1]


def _stiffness(curve: DiscreteCurve) -> np.ndarray:
    """Symmetric matrix of ``-(w f')'``-type fluxes across edges."""
    N = curve.n_points
    sq = np.sum(curve.points ** 2, axis=1)
    ell = curve.edge_lengths()
    w_edge = INV_SQRT_2PI * np.exp(-0.25 * (sq + np.roll(sq, -1))) / ell
    i = np.arange(N)
    j = (i + 1) % N
    K = np.zeros((N, N))
    K[i, j] = w_edge
    K[j, i] = w_edge
    K[i, i] = -(w_edge + np.roll(w_edge, 1))
    return K


def assemble_operator(curve: DiscreteCurve) -> DiscreteOperator:
    """Weighted flux discretization of ``Delta - <x, grad> + 1 + kappa^2``."""
    M = _stiffness(curve) + np.diag(curve.weights * (1.0 + curve.kappa ** 2))
    return DiscreteOperator(M, curve.weights.copy())


def drift_laplacian(curve: DiscreteCurve, f) -> np.ndarray:
    """Discrete ``Delta f - <x, grad f>`` (no potential)."""
    return (_stiffness(curve) @ np.asarray(f, float)) / curve.weights


def discrete_gradient(curve: DiscreteCurve, f) -> np.ndarray:
    f = np.asarray(f, float)
    ell = curve.edge_lengths()
    return (np.roll(f, -1) - np.roll(f, 1)) / (ell + np.roll(ell, 1))


def self_adjointness_residual(op: DiscreteOperator, rng: np.random.Generator,
                              pairs: int = 20) -> float:
    """``max |<f, Lg> - <Lf, g>| / (|f| |g|)`` over random pairs, weighted norms."""
    worst = 0.0
    N = len(op.W)
    for _ in range(pairs):
        f, g = rng.standard_normal(N), rng.standard_normal(N)
        lhs = op.inner(f, op.apply(g))
        rhs = op.inner(op.apply(f), g)
        worst = max(worst, abs(lhs - rhs) / math.sqrt(op.inner(f, f) * op.inner(g, g)))
    return worst


def product_rule_residual(curve: DiscreteCurve, f, g) -> float:
    """``max |L(fg) - f Lg - g (Delta - <x,grad>) f - 2 <grad f, grad g>|``."""
    op = assemble_operator(curve)
    f, g = np.asarray(f, float), np.asarray(g, float)
    res = (op.apply(f * g) - f * op.apply(g) - g * drift_laplacian(curve, f)
           - 2 * discrete_gradient(curve, f) * discrete_gradient(curve, g))
    return float(np.abs(res).max())


def circle_levels(curve: DiscreteCurve, count: int) -> np.ndarray:
    """Distinct eigenvalue levels of ``L`` on a sampled circle, descending.

    Every Fourier degree ``l >= 1`` is doubly degenerate, so the spectrum is
    read off as entries ``0, 1, 3, 5, ...`` of the sorted list.
    """
    ev = assemble_operator(curve).eigenvalues()
    return np.array([ev[0]] + [ev[2 * l - 1] for l in range(1, count)])


def even_spectrum(curve: DiscreteCurve, count: int = 4):
    """Top eigenpairs of ``L`` restricted to antipodally even vertex functions.

    Returns ``(values, vectors)`` with values descending and vectors as
    full-length vertex functions.
    """
    if not curve.antipodal:
        raise ValueError("even spectrum needs an antipodally symmetric curve")
    op = assemble_operator(curve)
    N = curve.n_points
    half = N // 2
    P = np.vstack([np.eye(half), np.eye(half)])
    Me = P.T @ op.M @ P
    We = P.T @ np.diag(op.W) @ P
    vals, vecs = linalg.eigh(Me, We)
    order = np.argsort(vals)[::-1][:count]
    return vals[order], (P @ vecs[:, order]).T


def top_even_two_grid(m: int, lam: float | None = None, n_points: int = 256):
    """Top even eigenvalue of Gamma_m at ``N`` and ``2N`` with a Richardson error bar.

    Returns ``(extrapolated, error_estimate, coarse, fine)``.
    """
    coarse_c = shoot_closed_curve(m, lam=lam, n_points=n_points)
    fine_c = shoot_closed_curve(m, rho_guess=coarse_c.rho, lam=coarse_c.lam,
                                n_points=2 * n_points)
    coarse = even_spectrum(coarse_c, 1)[0][0]
    fine = even_spectrum(fine_c, 1)[0][0]
    err = abs(fine - coarse) / 3.0
    return fine + (fine - coarse) / 3.0, err, coarse, fine


def mean_convex_form_check(curve: DiscreteCurve) -> dict[str, float]:
    """Compare ``int h L h`` with ``int (2 h^2 + lambda h kappa^2)`` for ``h = max(kappa, 0)``."""
    op = assemble_operator(curve)
    h = np.maximum(curve.kappa, 0.0)
    lhs = op.form(h, h)
    rhs = float(np.sum((2 * h * h + curve.lam * h * curve.kappa ** 2) * op.W))
    return {"lhs": lhs, "rhs": rhs, "relErr": abs(lhs - rhs) / max(abs(rhs), 1e-300)}


def rotation_field(curve: DiscreteCurve) -> np.ndarray:
    """Normal speed ``<J x, N>`` of an infinitesimal rotation (``J`` = quarter turn)."""
    x, y = curve.points[:, 0], curve.points[:, 1]
    return -y * curve.normals[:, 0] + x * curve.normals[:, 1]


def count_nodal_domains(u, rel_tol: float = 1e-9) -> int:
    """Sign changes of a function on a closed curve; near-zeros are dropped first."""
    u = np.asarray(u, float)
    peak = np.abs(u).max(initial=0.0)
    if peak == 0:
        return 0
    signs = np.sign(u[np.abs(u) > rel_tol * peak])
    changes = int(np.count_nonzero(signs != np.roll(signs, 1)))
    return max(changes, 1)


def rotation_nodal_count(curve: DiscreteCurve) -> dict:
    """Nodal domains of the rotation field.

    Instability follows from more than four nodal domains of the rotation
    field within antipodally even functions, i.e. counted on the curve
    modulo ``x ~ -x``; ``unstableFlag`` applies that count and is false for
    curves that are not antipodally symmetric.
    """
    u = rotation_field(curve)
    if np.abs(u).max() <= 1e-9 * max(np.abs(curve.points).max(), 1.0):
        u = np.zeros_like(u)
    count = count_nodal_domains(u)
    flag = bool(curve.antipodal and count // 2 > 4)
    return {"u": u, "nodalDomains": count, "unstableFlag": flag}


def quadratic_form(curve: DiscreteCurve, f) -> float:
    """``Q(f) = sum f (L f) w``."""
    return assemble_operator(curve).form(f, f)


def is_even(curve: DiscreteCurve, f, tol: float = 1e-12) -> bool:
    f = np.asarray(f, float)
    if not curve.antipodal:
        return False
    return bool(np.abs(np.roll(f, -curve.n_points // 2) - f).max()
                <= tol * max(np.abs(f).max(), 1.0))


def lifted_quadratic_form(curve: DiscreteCurve, f) -> float:
    """Second variation of ``curve x R`` along ``(x_3^2 - 1) f``: ``-2 (Q(f) - 2 |f|^2)``.

    Negative values certify instability; ``f`` must be antipodally even.
    """
    if not is_even(curve, f):
        raise ValueError("the lift certificate needs an antipodally even function")
    f = np.asarray(f, float)
    return -2.0 * (quadratic_form(curve, f) - 2.0 * float(np.sum(f * f * curve.weights)))


def curve_summary(curve: DiscreteCurve) -> dict:
    nodal = rotation_nodal_count(curve)
    top = even_spectrum(curve, 1)[0][0] if curve.antipodal else None
    return {
        "m": curve.m,
        "points": curve.n_points,
        "lambda": curve.lam,
        "rho": curve.rho,
        "mFold": curve.m_fold,
        "antipodal": curve.antipodal,
        "convex": curve.is_convex(),
        "residual": shrinker_residual(curve),
        "topEvenEigenvalue": None if top is None else float(top),
        "nodalDomains": nodal["nodalDomains"],
        "unstableFlag": nodal["unstableFlag"],
    }
