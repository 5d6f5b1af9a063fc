"""The pole equation (1 - y^2)^s = beta * y on (0, 1) and its two expansions.

Near beta = 0 the root approaches 1 and the complement c = 1 - y carries all
the information; it is therefore solved and returned separately so that
tiny complements do not round away.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConvergenceError, DomainError

DEFAULT_TOL = 1e-12


class Regime(str, Enum):
    SMALL_BETA = "SmallBeta"
    LARGE_BETA = "LargeBeta"


@dataclass(frozen=True)
class PoleParams:
    s: float
    beta: float

    def __post_init__(self):
        _check_s(self.s)
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")


def _check_s(s):
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")


@dataclass(frozen=True)
class PoleRoot:
    y: float
    complement: float  # 1 - y, accurate even when y rounds to 1
    residual: float


def _residual(s, beta, y, c):
    return np.abs((c * (2.0 - c)) ** s - beta * y)


def solve_pole_array(s: float, beta, tol: float = DEFAULT_TOL, newton_steps: int = 12):
    """Vectorized root: returns (y, 1 - y) arrays for an array of beta."""
    _check_s(s)
    beta = np.asarray(beta, dtype=float)
    if np.any(~(beta > 0)):
        raise DomainError("beta must be positive")
    shape = beta.shape
    beta = beta.ravel()
    y = np.empty_like(beta)
    c = np.empty_like(beta)
    # the root exceeds 1/2 exactly when the left side still dominates there
    near_one = s * math.log(0.75) > np.log(beta / 2.0)

    if np.any(near_one):
        bt = beta[near_one]
        lb = np.log(bt)

        def g(u):  # increasing in u = log c
            cc = np.exp(u)
            return s * (u + np.log(2.0 - cc)) - lb - np.log1p(-cc)

        hi = np.full_like(bt, math.log(0.5))
        lo = np.minimum(np.log(0.25) + 0.0 * bt, (lb - math.log(2.0)) / s - 2.0)
        while np.any(g(lo) > 0):
            lo = np.where(g(lo) > 0, lo - 50.0, lo)
        u = _bisect(g, lo, hi, increasing=True)
        for _ in range(newton_steps):
            cc = np.exp(u)
            d = s * (1.0 - cc / (2.0 - cc)) + cc / (1.0 - cc)
            step = g(u) / d
            u = np.clip(u - step, lo, hi)
            if np.all(np.abs(step) < 1e-16):
                break
        c[near_one] = np.exp(u)
        y[near_one] = 1.0 - c[near_one]

    far = ~near_one
    if np.any(far):
        bt = beta[far]
        lb = np.log(bt)

        def f(u):  # decreasing in u = log y
            yy = np.exp(u)
            return s * np.log1p(-yy * yy) - lb - u

        hi = np.full_like(bt, math.log(0.5))
        lo = np.minimum(hi - 1e-3, math.log(0.5) + s * math.log(0.75) - lb)
        u = _bisect(f, lo, hi, increasing=False)
        for _ in range(newton_steps):
            yy = np.exp(u)
            d = -2.0 * s * yy * yy / (1.0 - yy * yy) - 1.0
            step = f(u) / d
            u = np.clip(u - step, lo, hi)
            if np.all(np.abs(step) < 1e-16):
                break
        y[far] = np.exp(u)
        c[far] = 1.0 - y[far]

    res = _residual(s, beta, y, c)
    if np.any(res > tol):
        worst = int(np.argmax(res))
        raise ConvergenceError(
            f"pole residual {res[worst]:.3e} > {tol:.1e} at s={s}, beta={beta[worst]}"
        )
    return y.reshape(shape), c.reshape(shape)


def _bisect(fun, lo, hi, increasing, width=1e-4):
    lo, hi = lo.copy(), hi.copy()
    while np.any(hi - lo > width):
        mid = 0.5 * (lo + hi)
        v = fun(mid)
        right = (v > 0) if increasing else (v < 0)
        hi = np.where(right, mid, hi)
        lo = np.where(right, lo, mid)
    return 0.5 * (lo + hi)


def solve_pole_root(p: PoleParams, tol: float = DEFAULT_TOL) -> PoleRoot:
    y, c = solve_pole_array(p.s, np.array([p.beta]), tol)
    return PoleRoot(float(y[0]), float(c[0]), float(_residual(p.s, p.beta, y, c)[0]))


def solve_pole(p: PoleParams, tol: float = DEFAULT_TOL) -> float:
    """The unique y in (0, 1) with (1 - y^2)^s = beta y."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    return solve_pole_root(p, tol).y


# ------------------------------------------------------------ power series ops

def _mul(a, b):
    return np.convolve(a, b)[: len(a)]


def _log1p_series(a):
    """log(1 + a) for a truncated series with a[0] = 0."""
    out = np.zeros_like(a)
    for k in range(1, len(a)):
        acc = k * a[k]
        for m in range(1, k):
            acc -= m * out[m] * a[k - m]
        out[k] = acc / k
    return out


def _exp_series(a):
    """exp(a) for a truncated series with a[0] = 0."""
    out = np.zeros_like(a)
    out[0] = 1.0
    for k in range(1, len(a)):
        out[k] = sum(m * a[m] * out[k - m] for m in range(1, k + 1)) / k
    return out


def _pow1p(a, p):
    return _exp_series(p * _log1p_series(a))


def _shift(a):
    out = np.zeros_like(a)
    out[1:] = a[:-1]
    return out


def small_beta_coefficients(s: float, J: int) -> np.ndarray:
    """a_1..a_J in 1 - y = (eps/2)(1 + sum a_j eps^j), eps = beta^{1/s}.

    With c = 1 - y and w = 2c/eps the equation becomes
    w = (1 - c)^{1/s} / (1 - c/2); each fixed-point sweep on the truncated
    series in eps fixes one more coefficient.
    """
    _check_s(s)
    w = np.zeros(J + 1)
    w[0] = 1.0
    for _ in range(J + 1):
        c = 0.5 * _shift(w)
        num = _pow1p(-c, 1.0 / s)
        den = _pow1p(-0.5 * c, -1.0)
        w = _mul(num, den)
    return w[1:].copy()


def large_beta_coefficients(s: float, J: int) -> np.ndarray:
    """b_1..b_J in y = (1/beta)(1 + sum b_j beta^{-2j}).

    With q = beta^{-2} and y = (1 + w)/beta the equation becomes
    1 + w = (1 - q (1 + w)^2)^s.
    """
    _check_s(s)
    w = np.zeros(J + 1)
    for _ in range(J + 1):
        one_w = w.copy()
        one_w[0] += 1.0
        u = _shift(_mul(one_w, one_w))
        w = _pow1p(-u, s)
        w[0] -= 1.0
    return w[1:].copy()


@dataclass(frozen=True)
class PoleSeries:
    """Truncated expansion of y(beta) with its regime tag."""

    s: float
    regime: Regime
    coefficients: np.ndarray
    order: int
    window: tuple = field(default=(0.0, math.inf))

    def complement(self, beta):
        """1 - y(beta); only meaningful in the small-beta regime."""
        beta = np.asarray(beta, dtype=float)
        if self.regime is not Regime.SMALL_BETA:
            return 1.0 - self.evaluate(beta)
        eps = beta ** (1.0 / self.s)
        return 0.5 * eps * (1.0 + _horner(self.coefficients, eps))

    def evaluate(self, beta):
        beta = np.asarray(beta, dtype=float)
        if self.regime is Regime.SMALL_BETA:
            return 1.0 - self.complement(beta)
        q = beta ** -2.0
        return (1.0 + _horner(self.coefficients, q)) / beta


def _horner(coef, x):
    """sum_{j>=1} coef[j-1] x^j."""
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for a in coef[::-1]:
        acc = (acc + a) * x
    return acc


def _empirical_window(series: PoleSeries, rel: float = 1e-6):
    """Largest (small regime) or smallest (large regime) beta on a dyadic
    grid where the series matches the solver to ``rel`` relative accuracy
    for every grid point on the near side."""
    grid = np.logspace(-4, 4, 81)
    if series.regime is Regime.SMALL_BETA:
        _, c = solve_pole_array(series.s, grid)
        err = np.abs(series.complement(grid) - c) / c
        ok = err <= rel
        edge = 0.0
        for b, good in zip(grid, ok):
            if not good:
                break
            edge = b
        return (0.0, edge)
    y, _ = solve_pole_array(series.s, grid)
    err = np.abs(series.evaluate(grid) - y) / y
    edge = math.inf
    for b, good in zip(grid[::-1], err[::-1] <= rel):
        if not good:
            break
        edge = b
    return (edge, math.inf)


def small_beta_series(s: float, J: int) -> PoleSeries:
    _check_s(s)
    if J < 0:
        raise DomainError("order J must be nonnegative")
    ser = PoleSeries(s, Regime.SMALL_BETA, small_beta_coefficients(s, J), J)
    return PoleSeries(s, ser.regime, ser.coefficients, J, _empirical_window(ser))


def large_beta_series(s: float, J: int) -> PoleSeries:
    _check_s(s)
    if J < 0:
        raise DomainError("order J must be nonnegative")
    ser = PoleSeries(s, Regime.LARGE_BETA, large_beta_coefficients(s, J), J)
    return PoleSeries(s, ser.regime, ser.coefficients, J, _empirical_window(ser))


def radius_estimate(s: float, regime: Regime, order: int = 40) -> float:
    """Root-test estimate of the convergence radius, expressed in beta.

    The coefficients are computed to ``order`` and the radius in the series
    variable is read off from |coef_j|^{-1/j} over the last ten terms; this
    is a diagnostic, not a certified bound.
    """
    if regime is Regime.SMALL_BETA:
        coef = small_beta_coefficients(s, order)
    else:
        coef = large_beta_coefficients(s, order)
    j = np.arange(1, order + 1)
    tail = slice(order - 10, order)
    nz = np.abs(coef[tail]) > 0
    if not np.any(nz):
        return math.inf
    rad = float(np.median(np.abs(coef[tail][nz]) ** (-1.0 / j[tail][nz])))
    if regime is Regime.SMALL_BETA:
        return rad ** s  # eps = beta^{1/s}
    return rad ** -0.5  # q = beta^{-2}
