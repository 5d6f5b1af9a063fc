"""Density Phi_s of the one-sided s-stable subordinator, e^{-lam^s} = int Phi_s e^{-lam x} dx.

Two evaluation routes are provided.  The convergent series in x^{-s} is
accurate once its largest term is not much bigger than the sum; for small x
it cancels catastrophically and the inverse Laplace integral is evaluated
along a wedge contour instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError, PrecisionError
from .quadrature import log_grid
from .special import lgamma

# the series is used while its largest term stays below this multiple of 1
SERIES_MAX_TERM = 1e3


@dataclass(frozen=True)
class SubordinatorParams:
    s: float
    truncation: int = 200
    contour_sigma: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"s must lie in (0, 1), got {self.s}")
        if self.truncation < 1:
            raise DomainError("truncation must be at least 1")
        if self.contour_sigma < 0:
            raise DomainError("contour_sigma must be nonnegative")


@dataclass(frozen=True)
class SeriesValue:
    value: float
    remainder_bound: float
    max_term: float
    terms: int


def _series_terms(s, x, J):
    j = np.arange(1, J + 1, dtype=float)
    logmag = lgamma(s * j + 1.0) - lgamma(j + 1.0) - (s * j + 1.0) * math.log(x)
    sign = np.where(j % 2 == 1, 1.0, -1.0) * np.sin(math.pi * s * j)
    return sign * np.exp(logmag) / math.pi, logmag - math.log(math.pi)


def phi_series_detail(p: SubordinatorParams, x: float) -> SeriesValue:
    """Partial sum with an a-posteriori bound on the omitted tail.

    Once |term_j| is decreasing with ratio rho_j < 1 and the ratios keep
    decreasing (true for j large since Gamma(sj+1)/j! shrinks), the tail
    after the last kept term is at most |t_{J+1}| / (1 - rho_{J+1}).
    """
    if not x > 0:
        raise DomainError("phi_series requires x > 0")
    s, J = p.s, p.truncation
    terms, logmag = _series_terms(s, x, J + 2)
    ratios = np.exp(np.diff(logmag))
    # index from which magnitudes decay monotonically with ratio < 1
    bad = np.nonzero(ratios[:J] >= 1.0)[0]
    if bad.size and bad[-1] >= J - 2:
        raise PrecisionError(
            f"series terms still growing at truncation {J} for s={s}, x={x}"
        )
    val = float(terms[:J].sum())
    rho = ratios[J]
    if rho >= 1.0:
        raise PrecisionError("series tail ratio not below one at truncation")
    bound = float(np.exp(logmag[J])) / (1.0 - rho)
    return SeriesValue(val, bound, float(np.exp(logmag[:J].max())), J)


def phi_series(p: SubordinatorParams, x: float) -> float:
    return phi_series_detail(p, x).value


def _wedge_angle(s: float) -> float:
    # beyond pi/2 so e^{xz} decays, below pi/(2s) so e^{-z^s} decays too
    return 0.5 * (0.5 * math.pi + min(math.pi, 0.5 * math.pi / s))


def phi_contour_detail(p: SubordinatorParams, x: float, panel: float = 0.1, nodes: int = 16):
    """Inverse Laplace integral on z = sigma + r e^{+-i theta}.

    Returns (value, imaginary_residue).  The two rays are integrated
    separately so that the vanishing imaginary part is an actual check.
    """
    if x <= 0:
        return 0.0, 0.0
    s, sig = p.s, p.contour_sigma
    th = _wedge_angle(s)
    zstar = (s / x) ** (1.0 / (1.0 - s))
    # decay lengths of the two exponentials along the ray
    R1 = 60.0 / (x * abs(math.cos(th)))
    R2 = (60.0 / math.cos(s * th)) ** (1.0 / s) if s * th < 0.5 * math.pi else math.inf
    R = min(R1, R2) + 10.0 * sig
    lo = min(zstar, 1.0) * 1e-12
    r, w = log_grid(lo, R, panel, nodes)
    total = 0.0 + 0.0j
    for sgn in (1.0, -1.0):
        e = np.exp(1j * sgn * th)
        z = sig + r * e
        g = np.exp(x * z - z ** s) * e
        # [0, lo] contributes lo times the (constant) integrand at the apex
        total += sgn * (g @ w + lo * math.exp(x * sig - sig ** s) * e)
    val = total / (2j * math.pi)
    if not np.isfinite(val):
        raise ConvergenceError(f"contour quadrature overflowed at s={s}, x={x}")
    return float(val.real), float(abs(val.imag))


def phi_contour(p: SubordinatorParams, x: float) -> float:
    return phi_contour_detail(p, x)[0]


def use_series(s: float, x: float) -> bool:
    """Crossover rule: series only while its largest term is moderate."""
    if x <= 0:
        return False
    j = np.arange(1, 400, dtype=float)
    logmag = lgamma(s * j + 1.0) - lgamma(j + 1.0) - (s * j + 1.0) * math.log(x)
    return float(logmag.max()) <= math.log(SERIES_MAX_TERM)


@lru_cache(maxsize=64)
def crossover(s: float) -> float:
    """Smallest x (on a fine log grid) from which the series is used."""
    xs = np.logspace(-3, 2, 501)
    ok = [use_series(s, float(x)) for x in xs]
    for i in range(len(xs) - 1, -1, -1):
        if not ok[i]:
            return float(xs[min(i + 1, len(xs) - 1)])
    return float(xs[0])


def phi(s: float, x, truncation: int = 400):
    """Phi_s at scalar or array x, choosing the route per point."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    out = np.zeros_like(xs)
    xc = crossover(s)
    p = SubordinatorParams(s, truncation)
    big = xs >= xc
    if np.any(big):
        out[big] = _series_array(s, xs[big], truncation)
    for i in np.nonzero((xs > 0) & ~big)[0]:
        out[i] = phi_contour_detail(p, float(xs[i]))[0]
    return float(out[0]) if scalar else out


def _series_array(s, x, J):
    j = np.arange(1, J + 1, dtype=float)
    coef_log = lgamma(s * j + 1.0) - lgamma(j + 1.0)
    sign = np.where(j % 2 == 1, 1.0, -1.0) * np.sin(math.pi * s * j)
    lx = np.log(x)[:, None]
    terms = sign[None, :] * np.exp(coef_log[None, :] - (s * j[None, :] + 1.0) * lx)
    return terms.sum(axis=1) / math.pi


def lower_cutoff(s: float, digits: float = 70.0) -> float:
    """Point below which Phi_s < e^{-digits} (from the saddle-point exponent)."""
    return s * ((1.0 - s) / digits) ** ((1.0 - s) / s)


def tail_mass(s: float, X: float, J: int = 400) -> float:
    """int_X^inf Phi_s, from the termwise-integrated series."""
    j = np.arange(1, J + 1, dtype=float)
    logmag = lgamma(s * j) - lgamma(j + 1.0) - s * j * math.log(X)
    sign = np.where(j % 2 == 1, 1.0, -1.0) * np.sin(math.pi * s * j)
    return float((sign * np.exp(logmag)).sum() / math.pi)


@lru_cache(maxsize=16)
def _low_grid(s: float, panel: float, nodes: int):
    # contour-evaluated part below the crossover, shared by every upper limit
    x, w = log_grid(lower_cutoff(s), crossover(s), panel, nodes)
    return x, w, phi(s, x)


@lru_cache(maxsize=64)
def phi_grid(s: float, hi: float = 1e6, panel: float = 0.1, nodes: int = 16):
    """Cached log-spaced Gauss-Legendre nodes, weights and Phi_s values.

    Covers [lower_cutoff(s), hi]; integrals of Phi_s against smooth bounded
    functions reduce to one dot product with these weights.
    """
    xl, wl, pl = _low_grid(s, panel, nodes)
    xu, wu = log_grid(crossover(s), hi, panel, nodes)
    return (np.concatenate([xl, xu]), np.concatenate([wl, wu]),
            np.concatenate([pl, _series_array(s, xu, 400)]))


def laplace_value(s: float, lam: float) -> float:
    if not lam > 0:
        raise DomainError("lambda must be positive")
    # e^{-lam x} < e^{-60} beyond hi; the grid is cached per decade of hi
    hi = 10.0 ** math.ceil(math.log10(max(100.0, 60.0 / lam)))
    x, w, ph = phi_grid(s, hi)
    return float((ph * np.exp(-lam * x)) @ w)


def laplace_check(p: SubordinatorParams, lam: float) -> float:
    """|int Phi_s(x) e^{-lam x} dx - e^{-lam^s}|."""
    return abs(laplace_value(p.s, lam) - math.exp(-lam ** p.s))


def mass(s: float, X: float = 50.0) -> float:
    """Total mass: quadrature on [cutoff, X] plus the series tail beyond X."""
    x, w, ph = phi_grid(s, X)
    return float(ph @ w) + tail_mass(s, X)


def phi_half_closed(x):
    """Phi_{1/2}(x) = x^{-3/2} e^{-1/(4x)} / (2 sqrt(pi)); registered oracle."""
    x = np.asarray(x, dtype=float)
    return x ** -1.5 * np.exp(-0.25 / x) / (2.0 * math.sqrt(math.pi))
