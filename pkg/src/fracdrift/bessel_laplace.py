"""I_nu(lam) = int_0^inf J_nu(r) r^{nu+1} e^{-lam r^{2s}} dr.

For small lam the integrand grows like r^{nu+1/2} over many oscillations
before the stretched exponential damps it, so the value comes from
cancellation; the quadrature route sums panels between Bessel zeros and
accelerates the alternating partial sums.  The power series in lam and the
subordination representation serve as independent routes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import QuadratureConfig
from .errors import DomainError
from .quadrature import hankel_integral
from .special import gamma, lgamma
from .subordinator import phi_grid


@dataclass(frozen=True)
class BesselLaplaceParams:
    """s may equal 1, which is the Gaussian configuration of the integral."""

    s: float
    nu: float
    lam: float

    def __post_init__(self):
        if not 0.0 < self.s <= 1.0:
            raise DomainError(f"s must lie in (0, 1], got {self.s}")
        if self.nu < 0:
            raise DomainError("nu must be nonnegative")
        if not self.lam > 0:
            raise DomainError("lambda must be positive")


@dataclass(frozen=True)
class SeriesResult:
    value: float
    coefficients: np.ndarray  # mu_1 .. mu_K
    order: int


def _tail_bound(s, nu, lam):
    # |J_nu(r)| <= 1, so the remainder beyond R is at most the tail of
    # r^{nu+1} e^{-lam r^{2s}}, bounded by integrating past its maximum.
    def bound(R):
        if R <= 0:
            return math.inf
        q = 2 * s * lam * R ** (2 * s)
        if q <= nu + 2:
            return math.inf
        return R ** (nu + 2) * math.exp(-lam * R ** (2 * s)) / (q - nu - 2)
    return bound


def eval_integral(p: BesselLaplaceParams, q: QuadratureConfig | None = None):
    """Quadrature value of I_nu(lam); returns (value, error_estimate)."""
    q = q or QuadratureConfig()
    s, nu, lam = p.s, p.nu, p.lam

    def g(r):
        return r ** (nu + 1) * np.exp(-lam * r ** (2 * s))

    # geometric breakpoints around the damping scale lam^{-1/(2s)}
    scale = lam ** (-0.5 / s)
    pts = [scale * 2.0 ** k for k in range(-12, 8) if scale * 2.0 ** k < 50.0]
    return hankel_integral(g, nu, 1.0, q, points=pts, damping=_tail_bound(s, nu, lam))


def _log_coefficients(s, nu, K):
    j = np.arange(1, K + 1, dtype=float)
    logmag = (lgamma(s * j + 1.0) + lgamma(s * j + nu + 1.0) - lgamma(j + 1.0)
              + s * j * math.log(4.0) + (nu + 1.0) * math.log(2.0) - math.log(math.pi))
    sign = np.where(j % 2 == 1, 1.0, -1.0) * np.sin(math.pi * s * j)
    return j, logmag, sign


def series_coefficients(s: float, nu: float, K: int) -> np.ndarray:
    """mu_j, j = 1..K, of I_nu(lam) = sum_j mu_j lam^j.

    mu_j = (2^{nu+1}/pi) (-1)^{j-1} Gamma(sj+1) Gamma(sj+nu+1) sin(pi s j) 4^{sj} / j!
    """
    if not 0.0 < s < 1.0:
        raise DomainError("series requires 0 < s < 1")
    if K < 1:
        raise DomainError("order K must be at least 1")
    _, logmag, sign = _log_coefficients(s, nu, K)
    with np.errstate(over="ignore"):
        return sign * np.exp(logmag)


def asymptotic_series(p: BesselLaplaceParams, K: int) -> SeriesResult:
    """Partial sum sum_{j<=K} mu_j lam^j.

    For 2s < 1 the full series is entire in lam.  For 2s > 1 it is only
    asymptotic; pass ``K = 0`` to truncate before the smallest term.
    """
    if K == 0:
        K = optimal_truncation(p)
    j, logmag, sign = _log_coefficients(p.s, p.nu, K)
    value = float((sign * np.exp(logmag + j * math.log(p.lam))).sum())
    return SeriesResult(value, series_coefficients(p.s, p.nu, K), K)


def optimal_truncation(p: BesselLaplaceParams, kmax: int = 400) -> int:
    """Index of the smallest nonzero term |mu_j lam^j| (asymptotic case)."""
    j, logmag, sign = _log_coefficients(p.s, p.nu, kmax)
    mag = np.where(np.abs(sign) > 1e-12, logmag + j * math.log(p.lam), np.inf)
    return int(np.argmin(mag)) + 1


def series_value(p: BesselLaplaceParams, kmax: int = 400) -> float:
    """Converged series value (entire case); loses digits once lam is O(1)."""
    if 2 * p.s >= 1:
        raise DomainError("the series converges only for 2s < 1")
    j, logmag, sign = _log_coefficients(p.s, p.nu, kmax)
    return float((sign * np.exp(logmag + j * math.log(p.lam))).sum())


def subordination_value(p: BesselLaplaceParams) -> float:
    """I_nu(lam) via e^{-lam r^{2s}} = int Phi_s(x) e^{-x lam^{1/s} r^2} dx
    and the Gaussian formula for each x."""
    s, nu, lam = p.s, p.nu, p.lam
    if s >= 1.0:
        return gaussian_oracle(nu, lam)
    # the x-integrand decays like x^{-(nu+2+s)} once x lam^{1/s} >> 1
    hi = 10.0 ** math.ceil(math.log10(max(1e6, 1e8 * lam ** (-1.0 / s))))
    x, w, ph = phi_grid(s, hi)
    a = x * lam ** (1.0 / s)
    vals = (2.0 * a) ** (-(nu + 1.0)) * np.exp(-0.25 / a)
    return float((ph * vals) @ w)


def gaussian_oracle(nu: float, alpha: float) -> float:
    """int x^{nu+1} J_nu(x) e^{-alpha x^2} dx = (2 alpha)^{-(nu+1)} e^{-1/(4 alpha)}."""
    return (2.0 * alpha) ** (-(nu + 1.0)) * math.exp(-0.25 / alpha)


def large_lambda_limit(s: float, nu: float, lam: float) -> float:
    """Leading term Gamma((nu+1)/s) / (2s 2^nu Gamma(nu+1) lam^{(nu+1)/s})."""
    return float(gamma((nu + 1.0) / s) / (2.0 * s * 2.0 ** nu * gamma(nu + 1.0))
                 * lam ** (-(nu + 1.0) / s))
