"""Drift-straightening coordinates: Phi(y', t) is the flow of a localized
field mu for time t started at (y', 0), so that nu . grad u = d/dt (u o Phi)
wherever mu = nu.

    mu(x) = psi_r(x - x0) nu(x) + (1 - psi_r(x - x0)) nu(x0),

with psi_r = 1 on B_r and 0 outside B_{2r}.  The chart Jacobian comes from
the variational equation integrated alongside the flow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (ChartRangeError, DegenerateFieldError, DomainError, NearSingularError,
                     StepFailure)
from .quadrature import gauss_legendre
from .spectral import smooth_step


def _step_derivative(t):
    """d/dt of smooth_step."""
    t = float(t)
    if t <= 0.0 or t >= 1.0:
        return 0.0
    a, c = math.exp(-1.0 / t), math.exp(-1.0 / (1.0 - t))
    da, dc = a / (t * t), c / ((1.0 - t) ** 2)
    return (da * c + a * dc) / (a + c) ** 2


def psi(x, r):
    """Radial cutoff psi(x / r): 1 on |x| < r, 0 on |x| > 2r."""
    return 1.0 - float(smooth_step(np.linalg.norm(x) / r - 1.0))


def grad_psi(x, r):
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return np.zeros_like(x)
    return -_step_derivative(nx / r - 1.0) / r * x / nx


def fd_jacobian(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h))
    return np.column_stack(cols)


@dataclass(frozen=True)
class DriftField:
    """A smooth field nu: R^n -> R^n with base point x0 and cutoff radius r.

    ``jac`` is the analytic Jacobian of nu; central differences are used
    when it is omitted.
    """

    nu: Callable
    x0: tuple
    r: float = 1.0
    jac: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("cutoff radius must be positive")
        v0 = self.nu0
        if not np.any(v0):
            raise DegenerateFieldError("nu(x0) = 0: no straightening chart exists")
        if v0[-1] == 0.0:
            raise DomainError("nu_n(x0) = 0; rotate coordinates first (see DriftField.normalized)")

    @property
    def n(self) -> int:
        return len(self.x0)

    @property
    def nu0(self) -> np.ndarray:
        return np.asarray(self.nu(np.asarray(self.x0, dtype=float)), dtype=float)

    def dnu(self, x):
        return np.asarray(self.jac(x), dtype=float) if self.jac else fd_jacobian(self.nu, x)

    def with_radius(self, r):
        return DriftField(self.nu, self.x0, r, self.jac, self.name)

    def mu(self, x):
        x = np.asarray(x, dtype=float)
        p = psi(x - np.asarray(self.x0), self.r)
        if p == 1.0:
            return np.asarray(self.nu(x), dtype=float)
        if p == 0.0:
            return self.nu0
        return p * np.asarray(self.nu(x), dtype=float) + (1.0 - p) * self.nu0

    def dmu(self, x):
        x = np.asarray(x, dtype=float)
        z = x - np.asarray(self.x0)
        p = psi(z, self.r)
        if p == 0.0:
            return np.zeros((self.n, self.n))
        out = p * self.dnu(x)
        if p < 1.0:
            out = out + np.outer(np.asarray(self.nu(x)) - self.nu0, grad_psi(z, self.r))
        return out

    @staticmethod
    def normalized(nu: Callable, x0, r: float = 1.0, name: str = "custom") -> "DriftField":
        """Translate x0 to the origin and rotate nu(x0) onto e_n."""
        x0 = np.asarray(x0, dtype=float)
        v = np.asarray(nu(x0), dtype=float)
        if not np.any(v):
            raise DegenerateFieldError("nu(x0) = 0")
        Q = _householder_to(v / np.linalg.norm(v))  # Q e_n = v/|v|, Q symmetric orthogonal

        def nut(xt):
            return Q @ np.asarray(nu(x0 + Q @ np.asarray(xt)), dtype=float)
        return DriftField(nut, tuple(np.zeros_like(x0)), r, None, name)


def _householder_to(c):
    """Symmetric orthogonal H with H e_n = c (c a unit vector)."""
    n = c.size
    e = np.zeros(n)
    e[-1] = 1.0
    v = c - e
    nv = float(v @ v)
    if nv < 1e-30:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(v, v) / nv


@dataclass(frozen=True)
class FlowConfig:
    rtol: float = 1e-12
    atol: float = 1e-12
    method: str = "DOP853"
    samples: int = 24
    seed: int = 7
    max_contraction: float = 0.5
    max_condition: float = 10.0
    newton_tol: float = 1e-13
    newton_iter: int = 30


@dataclass(frozen=True)
class FlowChart:
    field: DriftField      # carries mu through its cutoff radius r_bar
    r_bar: float
    r0: float
    contraction: float
    C: float
    cfg: FlowConfig

    @property
    def n(self):
        return self.field.n

    def _start(self, y):
        y = np.asarray(y, dtype=float)
        p = np.asarray(self.field.x0, dtype=float).copy()
        p[:-1] += y[:-1]
        return p

    def _integrate(self, x, T, with_jac, J0=None):
        n = self.n
        if T == 0.0:
            return x.copy(), (J0.copy() if with_jac else None)
        if with_jac:
            def rhs(_, z):
                X = z[:n]
                M = z[n:].reshape(n, n)
                return np.concatenate([self.field.mu(X), (self.field.dmu(X) @ M).ravel()])
            z0 = np.concatenate([x, J0.ravel()])
        else:
            def rhs(_, z):
                return self.field.mu(z)
            z0 = x
        sol = solve_ivp(rhs, (0.0, T), z0, method=self.cfg.method, rtol=self.cfg.rtol,
                        atol=self.cfg.atol)
        if not sol.success:
            raise StepFailure(f"flow integration failed: {sol.message}")
        z = sol.y[:, -1]
        return z[:n], (z[n:].reshape(n, n) if with_jac else None)

    def flow_from(self, x, h):
        """Flow of mu for time h starting at x."""
        return self._integrate(np.asarray(x, dtype=float), float(h), False)[0]

    def phi(self, y):
        y = np.asarray(y, dtype=float)
        return self._integrate(self._start(y), float(y[-1]), False)[0]

    def phi_and_jacobian(self, y):
        y = np.asarray(y, dtype=float)
        x = self._start(y)
        J0 = np.eye(self.n)
        J0[:, -1] = self.field.mu(x)
        return self._integrate(x, float(y[-1]), True, J0)

    def jacobian(self, y):
        return self.phi_and_jacobian(y)[1]

    def frame(self, y):
        return frame_at(self, y)

    def inverse(self, x):
        """Newton on Phi(y) = x, seeded by the constant-drift chart."""
        x = np.asarray(x, dtype=float)
        A = np.eye(self.n)
        A[:, -1] = self.field.nu0
        y = np.linalg.solve(A, x - np.asarray(self.field.x0))
        for _ in range(self.cfg.newton_iter):
            p, J = self.phi_and_jacobian(y)
            step = np.linalg.solve(J, p - x)
            y = y - step
            if np.linalg.norm(step) <= self.cfg.newton_tol * max(1.0, np.linalg.norm(y)):
                return y
        raise StepFailure("Newton inverse did not converge")


def _ball_samples(n, radius, count, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    return g * radius * rng.random(count)[:, None] ** (1.0 / n)


def _chart_metrics(chart, radius, cfg):
    J0 = chart.jacobian(np.zeros(chart.n))
    J0inv = np.linalg.inv(J0)
    worst, C = 0.0, 1.0
    for y in _ball_samples(chart.n, radius, cfg.samples, cfg.seed):
        J = chart.jacobian(y)
        worst = max(worst, float(np.linalg.norm(np.eye(chart.n) - J0inv @ J, 2)))
        sv = np.linalg.svd(J, compute_uv=False)
        C = max(C, float(sv[0]), 1.0 / float(sv[-1]))
    sv = np.linalg.svd(J0, compute_uv=False)
    return worst, max(C, float(sv[0]), 1.0 / float(sv[-1]))


def build_flow(d: DriftField, cfg: FlowConfig | None = None, min_radius: float = 1e-3) -> FlowChart:
    """Build the chart, halving the cutoff radius from d.r until the chord
    Newton iteration y <- y - J(0)^{-1}(Phi(y) - x) contracts with factor
    below cfg.max_contraction on the ball of that radius; r0 = min(1, r_bar)/4."""
    cfg = cfg or FlowConfig()
    r = d.r
    while r >= min_radius:
        fld = d.with_radius(r)
        chart = FlowChart(fld, r, 0.25 * min(1.0, r), math.nan, math.nan, cfg)
        q, C = _chart_metrics(chart, r, cfg)
        if q < cfg.max_contraction:
            if C >= cfg.max_condition:
                raise DegenerateFieldError(f"nondegeneracy constant {C:.3g} exceeds {cfg.max_condition}")
            return FlowChart(fld, r, 0.25 * min(1.0, r), q, C, cfg)
        r *= 0.5
    raise DegenerateFieldError("no cutoff radius gives a contracting chart")


@dataclass(frozen=True)
class StraighteningResult:
    chain_rule: float
    finite_difference: float

    @property
    def max_residual(self) -> float:
        return max(self.chain_rule, self.finite_difference)


def verify_straightening(chart: FlowChart, d: DriftField, u: Callable, samples,
                         grad_u: Callable | None = None, use_mu: bool = False,
                         h: float = 1e-4) -> StraighteningResult:
    """max |nu(x) . grad u(x) - d/dt [u o Phi](y)| over x-samples with y = Phi^{-1}(x).

    With use_mu the left side uses mu instead of nu and samples may lie
    anywhere; otherwise they must lie in B_{r0}(x0), where mu = nu.
    """
    grad = grad_u or (lambda x: fd_jacobian(lambda z: np.atleast_1d(u(z)), x)[0])
    x0 = np.asarray(d.x0, dtype=float)
    ch, fd = 0.0, 0.0
    for x in np.atleast_2d(np.asarray(samples, dtype=float)):
        if not use_mu and np.linalg.norm(x - x0) > chart.r0:
            raise ChartRangeError(f"sample {x} lies outside B_r0(x0), r0 = {chart.r0}")
        field = chart.field.mu(x) if use_mu else np.asarray(d.nu(x), dtype=float)
        lhs = float(field @ grad(x))
        y = chart.inverse(x)
        px = chart.phi(y)
        chain = float(grad(px) @ chart.field.mu(px))
        e = np.zeros_like(y)
        e[-1] = h
        fdv = (u(chart.phi(y + e)) - u(chart.phi(y - e))) / (2.0 * h)
        ch = max(ch, abs(lhs - chain))
        fd = max(fd, abs(lhs - fdv))
    return StraighteningResult(ch, fd)


@dataclass(frozen=True)
class HMatrix:
    matrix: np.ndarray
    min_singular: float


def h_matrix(chart: FlowChart, x, y, nodes: int = 12, threshold: float = 1e-8) -> HMatrix:
    """H(x, y) = int_0^1 J_Phi(x + t (y - x)) dt by Gauss-Legendre."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        H = chart.jacobian(x)
    else:
        t, w = gauss_legendre(nodes)
        t = 0.5 * (t + 1.0)
        w = 0.5 * w
        H = sum(wi * chart.jacobian(x + ti * (y - x)) for ti, wi in zip(t, w))
    smin = float(np.linalg.svd(H, compute_uv=False)[-1])
    if smin < threshold:
        raise NearSingularError(f"H has smallest singular value {smin:.3e}; shrink the chart")
    return HMatrix(H, smin)


def frame_at(chart: FlowChart, y):
    """(b, U): b = |c|, U orthogonal with U^T e_n = c / b, c the last column of J_Phi(y)."""
    c = chart.jacobian(y)[:, -1]
    b = float(np.linalg.norm(c))
    if b == 0.0:
        raise DegenerateFieldError("last Jacobian column vanishes")
    return b, _householder_to(c / b).T


# ---------------------------------------------------------------- catalog

AFFINE_M = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.5], [0.3, 0.0, 0.0]])


def catalog(name: str, n: int = 3, eps: float = 0.1, r: float = 1.0) -> DriftField:
    """Named example fields: constant (e_n), affine (e_n + eps M x), rotational ((-x2, x1, 1))."""
    e = np.zeros(n)
    e[-1] = 1.0
    x0 = tuple(np.zeros(n))
    if name == "constant":
        return DriftField(lambda x: e.copy(), x0, r, lambda x: np.zeros((n, n)), name)
    if name == "affine":
        M = AFFINE_M[:n, :n] if n <= 3 else np.eye(n, k=1) - np.eye(n, k=-1)
        return DriftField(lambda x: e + eps * (M @ x), x0, r, lambda x: eps * M, name)
    if name == "rotational":
        if n != 3:
            raise DomainError("the rotational example is three-dimensional")

        def nu(x):
            return np.array([-x[1], x[0], 1.0])
        J = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        return DriftField(nu, x0, r, lambda x: J, name)
    raise DomainError(f"unknown field '{name}'; choose constant, affine or rotational")


CATALOG = ("constant", "affine", "rotational")
