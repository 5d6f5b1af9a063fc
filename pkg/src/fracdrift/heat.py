"""Anisotropic heat kernel p0_s(x'; x_n) of exp(-(x_n/b)(-Delta')^s) on R^{n-1}.

Normalization: p0 is the probability density

    p0(x'; t) = (2 pi)^{-(n-1)} int e^{i x'.xi'} e^{-t |xi'|^{2s}} dxi',

so that it integrates to one over R^{n-1}.  It vanishes for x_n < 0.

Hankel route.  With nu = (n-3)/2, rho = |x'| and kappa = rho t^{-1/(2s)},

    p0 = (2 pi)^{-(n-1)/2} t^{-(nu+1)/s} int kappa^{-nu} J_nu(kappa u) u^{nu+1} e^{-u^{2s}} du.

Subordination route.  e^{-t L^s} averages the Gaussian semigroup against
Phi_s, giving

    p0 = t^{-(n-1)/(2s)} int (4 pi x)^{-(n-1)/2} e^{-lam/(4x)} Phi_s(x) dx,  lam = rho^2 / t^{1/s}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel_laplace import series_coefficients
from .config import QuadratureConfig
from .errors import DomainError, FitError
from .quadrature import hankel_integral, log_grid
from .special import gamma
from .subordinator import phi_grid


@dataclass(frozen=True)
class HeatKernelQuery:
    s: float
    n: int
    rho: float
    xn: float
    b: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"s must lie in (0, 1), got {self.s}")
        if int(self.n) != self.n or self.n < 3:
            raise DomainError("the heat kernel module requires n >= 3")
        if self.rho < 0:
            raise DomainError("rho must be nonnegative")
        if not self.b > 0:
            raise DomainError("b must be positive")

    @property
    def nu(self) -> float:
        return 0.5 * (self.n - 3)

    @property
    def t(self) -> float:
        return self.xn / self.b


def _prefactor(n):
    return (2.0 * math.pi) ** (-0.5 * (n - 1))


def radial_profile(s: float, nu: float, kappa: float, cfg: QuadratureConfig | None = None):
    """int kappa^{-nu} J_nu(kappa u) u^{nu+1} e^{-u^{2s}} du (kappa >= 0)."""
    if kappa == 0.0:
        return float(gamma((nu + 1.0) / s) / (2.0 * s * 2.0 ** nu * gamma(nu + 1.0)))
    cfg = cfg or QuadratureConfig()

    def g(u):
        return u ** (nu + 1.0) * np.exp(-u ** (2.0 * s)) / kappa ** nu

    def tail(R):
        q = 2 * s * R ** (2 * s)
        if q <= nu + 2:
            return math.inf
        return R ** (nu + 2) * math.exp(-R ** (2 * s)) / (q - nu - 2) / kappa ** nu

    pts = [2.0 ** k for k in range(-10, 8)]
    return hankel_integral(g, nu, kappa, cfg, points=pts, damping=tail)[0]


def _check_evolution(xn):
    if xn == 0:
        raise DomainError("x_n = 0 is the initial time: the kernel is a point mass there")


def p0_hankel(q: HeatKernelQuery, cfg: QuadratureConfig | None = None) -> float:
    if q.xn < 0:
        return 0.0
    _check_evolution(q.xn)
    t = q.t
    kappa = q.rho * t ** (-0.5 / q.s)
    val = radial_profile(q.s, q.nu, kappa, cfg)
    return _prefactor(q.n) * t ** (-(q.nu + 1.0) / q.s) * val


def _subordination_profile(s, n, lam):
    """int (4 pi x)^{-(n-1)/2} e^{-lam/(4x)} Phi_s(x) dx for an array of lam."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    d = 0.5 * (n - 1)
    hi = 10.0 ** math.ceil(math.log10(max(1e6, 1e6 * float(lam.max()))))
    x, w, ph = phi_grid(s, hi)
    base = (4.0 * math.pi * x) ** (-d) * ph * w
    vals = np.exp(-0.25 * lam[:, None] / x[None, :]) @ base
    # Phi_s(x) ~ Gamma(1+s) sin(pi s) / (pi x^{1+s}) beyond hi
    c1 = float(gamma(1.0 + s)) * math.sin(math.pi * s) / math.pi
    vals += c1 * (4.0 * math.pi) ** (-d) * hi ** (-d - s) / (d + s)
    return vals


def p0_subordination(q: HeatKernelQuery, cfg: QuadratureConfig | None = None) -> float:
    if q.xn < 0:
        return 0.0
    _check_evolution(q.xn)
    return float(p0_subordination_array(q.s, q.n, np.array([q.rho]), q.t)[0])


def p0_subordination_array(s: float, n: int, rho, t: float):
    """Vectorized over rho at one evolution time t > 0 (already divided by b)."""
    rho = np.asarray(rho, dtype=float)
    lam = rho ** 2 / t ** (1.0 / s)
    return t ** (-(n - 1) / (2.0 * s)) * _subordination_profile(s, n, lam)


def poisson_oracle(rho, t):
    """s = 1/2, n = 3: t / (2 pi (t^2 + rho^2)^{3/2})."""
    rho = np.asarray(rho, dtype=float)
    return t / (2.0 * math.pi * (t * t + rho * rho) ** 1.5)


def tail_constant(s: float, n: int) -> float:
    """c in H+(lam) ~ c lam^{-s}, from the first Bessel-Laplace coefficient."""
    return _prefactor(n) * float(series_coefficients(s, 0.5 * (n - 3), 1)[0])


@dataclass(frozen=True)
class HPlusProfile:
    lambdas: np.ndarray
    values: np.ndarray
    slope: float
    constant: float
    fit_range: tuple
    derived_constant: float


def _loglog_fit(x, y):
    lx, ly = np.log(x), np.log(y)
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = float(np.max(np.abs(A @ coef - ly))) if lx.size else 0.0
    return float(coef[0]), float(math.exp(coef[1])), resid


def h_plus_profile(q: HeatKernelQuery, lambda_grid, tail_min: float = 1e4) -> HPlusProfile:
    """H+(lam) = p0 (x_n^{1/s} + |x'|^2)^{(n-1)/2} at |x'|^2 = lam x_n^{1/s}.

    The log-log slope and constant are fitted on lam >= tail_min.
    """
    if not q.xn > 0:
        raise DomainError("H+ is defined for x_n > 0")
    lam = np.asarray(lambda_grid, dtype=float)
    if np.any(lam <= 0):
        raise DomainError("lambda grid must be positive")
    t = q.t
    rho = np.sqrt(lam * t ** (1.0 / q.s))
    p = p0_subordination_array(q.s, q.n, rho, t)
    H = p * (t ** (1.0 / q.s) + rho * rho) ** (0.5 * (q.n - 1))
    if np.any(H <= 0):
        raise FitError("nonpositive H+ sample")
    sel = lam >= tail_min
    if sel.sum() < 2:
        raise FitError("need at least two lambda samples in the tail range")
    slope, const, _ = _loglog_fit(lam[sel], H[sel])
    return HPlusProfile(lam, H, slope, const, (float(lam[sel].min()), float(lam[sel].max())),
                        tail_constant(q.s, q.n))


def spatial_decay_slope(s: float, n: int, xn: float, rho_grid) -> float:
    """Log-log slope of rho -> p0(rho, xn) on the supplied (large) rho grid."""
    rho = np.asarray(rho_grid, dtype=float)
    p = p0_subordination_array(s, n, rho, xn)
    return _loglog_fit(rho, p)[0]


def normalization(s: float, n: int, t: float, rho_max_lam: float = 1e-4) -> float:
    """int_{R^{n-1}} p0 dx' by radial quadrature plus a series tail.

    The radial grid stops where lam = t / rho^{2s} equals ``rho_max_lam``;
    beyond it p0 = (2 pi)^{-(n-1)/2} rho^{-(n-1)} sum_j mu_j lam^j is
    integrated term by term.
    """
    d = n - 1
    area = 2.0 * math.pi ** (0.5 * d) / float(gamma(0.5 * d))
    P = (t / rho_max_lam) ** (0.5 / s)
    r0 = 1e-8 * t ** (0.5 / s)
    rho, w = log_grid(r0, P, 0.1, 16)
    p = p0_subordination_array(s, n, rho, t)
    inner = float((p * area * rho ** (d - 1)) @ w)
    # ball of radius r0 where p0 is essentially p0(0)
    inner += float(p0_subordination_array(s, n, np.array([0.0]), t)[0]) * area * r0 ** d / d
    mu = series_coefficients(s, 0.5 * (n - 3), 6)
    j = np.arange(1, 7)
    tail = _prefactor(n) * area * float(np.sum(mu * t ** j * P ** (-2 * s * j) / (2 * s * j)))
    return inner + tail


@dataclass(frozen=True)
class PowerRegimeFit:
    degree: int
    max_residual: float
    coefficients: np.ndarray


def power_series_regime_check(s: float, n: int, tol: float = 1e-4, max_degree: int = 24,
                              samples: int = 200) -> PowerRegimeFit:
    """For x_n / rho^{2s} >= 2, p0 x_n^{(n-1)/(2s)} is a smooth function of
    lam = rho^2 / x_n^{1/s} (here lam <= 2^{-1/s}).

    Chebyshev least-squares fits of increasing degree are tried; the first
    degree whose relative residual is below ``tol`` is reported (or the
    residual at ``max_degree``).  For small s the function is smooth but
    its Taylor series has zero radius, so the required degree grows.
    """
    lam = np.linspace(0.0, 2.0 ** (-1.0 / s), samples)
    F = _subordination_profile(s, n, lam)
    x = 2.0 * lam / lam[-1] - 1.0
    for deg in range(2, max_degree + 1):
        coef = np.polynomial.chebyshev.chebfit(x, F, deg)
        resid = float(np.max(np.abs(np.polynomial.chebyshev.chebval(x, coef) - F)) / np.abs(F).max())
        if resid <= tol:
            break
    return PowerRegimeFit(deg, resid, coef)
