"""Free-space kernel of (-Delta)^s + b d/dx_n for 0 < s < 1/2.

Convention: E_{s,b}(x) = int e^{i x.xi} dxi / (|xi|^{2s} + i b xi_n), with no
(2 pi)^{-n} factor.  Writing r = |xi'| and xi_n = r tau, the xi_n integral is

    T(r, x_n) = r^{1-2s} int e^{i r x_n tau} dtau / ((1 + tau^2)^s + i beta tau),
    beta = b r^{1-2s},

and closing the tau contour gives

    T = [x_n > 0] H(r, x_n) + e^{-r |x_n|} I^{sign x_n}(r, x_n),

with the residue H at the pole tau = i y(beta) and the branch-cut integrals

    I^{+-} = 2 sin(pi s) int_0^inf e^{-|x_n| sig} P / (P^2 + Q^2 -+ 2 P Q cos(pi s)) dsig,
    P = sig^s (sig + 2r)^s,   Q = b (sig + r).

E then follows from a Hankel transform over R^{n-1}:
E = (2 pi)^{(n-1)/2} rho^{-nu} int J_nu(r rho) r^{nu+1} T(r, x_n) dr, nu = (n-3)/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import QuadratureConfig, RadialPoint
from .errors import DomainError, FitError
from .heat import p0_subordination_array, tail_constant
from .pole import solve_pole_array
from .quadrature import adaptive, alternating_tail, hankel_integral, integrate_panels, log_grid
from .special import bessel_j_scaled_origin, gamma


@dataclass(frozen=True)
class GreenParams:
    s: float
    b: float = 1.0
    n: int = 3

    def __post_init__(self):
        if not 0.0 < self.s < 0.5:
            raise DomainError(f"the kernel module covers 0 < s < 1/2, got s={self.s}")
        if not self.b > 0:
            raise DomainError("b must be positive")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")

    @property
    def nu(self) -> float:
        return 0.5 * (self.n - 3)


@dataclass(frozen=True)
class ContourPieces:
    r: float
    xn: float
    residue: float  # nan when xn <= 0
    branch_plus: float
    branch_minus: float

    @property
    def total(self) -> float:
        if self.xn > 0:
            return self.residue + math.exp(-self.r * self.xn) * self.branch_plus
        return math.exp(-self.r * abs(self.xn)) * self.branch_minus


# ----------------------------------------------------------------- residue

def residue_array(s: float, b: float, r, xn: float):
    """H(r, x_n) = 2 pi e^{-r x_n y} (1 - y^2) / (b (1 - (1-2s) y^2)), vectorized in r."""
    r = np.asarray(r, dtype=float)
    y, c = solve_pole_array(s, b * r ** (1.0 - 2.0 * s))
    one_m_y2 = c * (2.0 - c)
    return 2.0 * math.pi * np.exp(-r * xn * y) * one_m_y2 / (b * (2.0 * s + (1.0 - 2.0 * s) * one_m_y2))


def residue_term(p: GreenParams, r: float, xn: float) -> float:
    if not xn > 0:
        raise DomainError("the residue exists only for x_n > 0")
    if not r > 0:
        raise DomainError("r must be positive")
    return float(residue_array(p.s, p.b, np.array([r]), xn)[0])


# ---------------------------------------------------------- branch integrals

def _sigma_grid(s, b, rmin, rmax, xn, panel, nodes, tol=1e-15):
    """Log grid in sigma covering every scale of the branch integrand."""
    lo = 1e-15 * min(rmin, 1.0, b ** (-1.0 / (1.0 - 2.0 * s)))
    # tail of sig^{2s-2}/b^2 beyond Sigma is Sigma^{2s-1}/((1-2s) b^2)
    hi = (tol * (1.0 - 2.0 * s) * b * b) ** (1.0 / (2.0 * s - 1.0))
    if xn != 0:
        hi = min(hi, 60.0 / abs(xn))
    hi = min(max(hi, 1e3 * max(rmax, 1.0)), 1e150)
    return log_grid(lo, hi, panel, nodes)


def branch_array(s: float, b: float, r, xn: float, side: int, panel: float = 0.5, nodes: int = 16):
    """I^{side}(r, x_n) for an array of r > 0 by log-grid Gauss-Legendre in sigma."""
    r = np.asarray(r, dtype=float)
    shape = r.shape
    rf = r.ravel()
    sig, w = _sigma_grid(s, b, float(rf.min()), float(rf.max()), xn, panel, nodes)
    cs = math.cos(math.pi * s)
    out = np.empty(rf.size)
    chunk = max(1, 2_000_000 // sig.size)
    damp = np.exp(-abs(xn) * sig) * w
    ss = sig ** s
    for i in range(0, rf.size, chunk):
        rr = rf[i:i + chunk, None]
        P = ss[None, :] * (sig[None, :] + 2.0 * rr) ** s
        Q = b * (sig[None, :] + rr)
        den = (P - Q) ** 2 + 2.0 * P * Q * (1.0 - side * cs) if side > 0 else \
            P * P + Q * Q + 2.0 * P * Q * cs
        out[i:i + chunk] = (P / den) @ damp
    return (2.0 * math.sin(math.pi * s) * out).reshape(shape)


def branch_integral(p: GreenParams, r: float, xn: float, side: int, nodes: int = 16,
                    panel: float = 0.5) -> float:
    """I^{+} (side = +1) or I^{-} (side = -1) at one (r, x_n)."""
    if not r > 0:
        raise DomainError("r must be positive")
    if side not in (1, -1):
        raise DomainError("side must be +1 or -1")
    return float(branch_array(p.s, p.b, np.array([r]), xn, side, panel, nodes)[0])


def contour_pieces(p: GreenParams, r: float, xn: float) -> ContourPieces:
    res = residue_term(p, r, xn) if xn > 0 else math.nan
    return ContourPieces(r, xn, res, branch_integral(p, r, xn, 1), branch_integral(p, r, xn, -1))


def decomposition(p: GreenParams, r: float, xn: float) -> float:
    """[x_n > 0] H + e^{-r|x_n|} I^{sign x_n}."""
    if xn == 0:
        raise DomainError("x_n = 0 is excluded")
    side = 1 if xn > 0 else -1
    val = math.exp(-r * abs(xn)) * branch_integral(p, r, xn, side)
    if xn > 0:
        val += residue_term(p, r, xn)
    return val


# --------------------------------------------------------- direct tau route

def tau_integral_direct(p: GreenParams, r: float, xn: float,
                        cfg: QuadratureConfig | None = None) -> float:
    """lim_R int_{-R}^{R} r^{1-2s} e^{i r x_n tau} dtau / ((1+tau^2)^s + i beta tau).

    The even/odd parts pair tau with -tau, leaving the real integral
    2 r^{1-2s} int_0^inf [A cos(w tau) + sgn(w) beta tau sin(|w| tau)] / (A^2 + beta^2 tau^2),
    A = (1 + tau^2)^s, w = r x_n.  Panels end at multiples of pi/|w| and the
    alternating panel sums are accelerated.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    if xn == 0:
        raise DomainError("x_n must be nonzero")
    cfg = cfg or QuadratureConfig()
    s = p.s
    beta = p.b * r ** (1.0 - 2.0 * s)
    w = r * xn
    aw = abs(w)
    sg = 1.0 if w > 0 else -1.0

    def f(t):
        A = (1.0 + t * t) ** s
        return (A * np.cos(aw * t) + sg * beta * t * np.sin(aw * t)) / (A * A + beta * beta * t * t)

    half = math.pi / aw
    # head: everything up to the first period boundary beyond the structure
    scales = [1.0, beta ** (-1.0 / (1.0 - 2.0 * s)) if beta < 1 else 1.0 / beta]
    reach = 64.0 * max(scales)
    k0 = min(max(1, int(math.ceil(reach / half))), 4000)
    pts = sorted({sc * 2.0 ** k for sc in scales for k in range(-8, 7)} |
                 set(half * np.arange(1, k0)))
    pts = [x for x in pts if 0 < x < k0 * half]
    head, _ = adaptive(f, 0.0, k0 * half, cfg, points=pts)

    def panels(idx):
        e = (k0 + np.arange(idx[0], idx[-1] + 2)) * half
        return integrate_panels(f, e, cfg)

    val, _, _ = alternating_tail(panels, cfg, base=head)
    return 2.0 * r ** (1.0 - 2.0 * s) * val


# ------------------------------------------------------------------ f_j

class FjFunction:
    """f_j(y) = int_0^inf e^{-y tau} [tau^s (tau+2)^s / (tau+1)]^{j+1} dtau / (tau+1).

    Values are cached per instance.  For y >= 1 the rescaled form

        f_j(y) = y^{-1-s(j+1)} int e^{-w} w^{s(j+1)} [(2 + w/y)^s / (1 + w/y)]^{j+1} dw / (1 + w/y)

    is used, which makes the large-y constant 2^{s(j+1)} Gamma(1 + s(j+1)) explicit.
    """

    def __init__(self, j: int, s: float):
        if j < 0:
            raise DomainError("j must be nonnegative")
        if not 0.0 < s < 0.5:
            raise DomainError("f_j needs 0 < s < 1/2")
        self.j = int(j)
        self.s = float(s)
        self._cache: dict[float, float] = {}

    @property
    def large_y_constant(self) -> float:
        a = self.s * (self.j + 1)
        return float(2.0 ** a * gamma(1.0 + a))

    @property
    def small_y_exponent(self) -> float:
        return (1.0 - 2.0 * self.s) * (self.j + 1)

    def _kernel(self, tau):
        s, m = self.s, self.j + 1
        return (tau ** s * (tau + 2.0) ** s / (tau + 1.0)) ** m / (tau + 1.0)

    def _tau_grid(self, y):
        hi = 1e-16 ** (-1.0 / self.small_y_exponent)
        if y > 0:
            hi = min(hi, 60.0 / y)
        return log_grid(1e-18, max(hi, 10.0), 0.25, 16)

    def scaled(self, y: float) -> float:
        """y^{1+s(j+1)} f_j(y), computed in the rescaled variable (y > 0)."""
        a = self.s * (self.j + 1)
        m = self.j + 1
        w, wt = log_grid(1e-18, 80.0, 0.25, 16)
        u = w / y
        g = np.exp(-w) * w ** a * ((2.0 + u) ** self.s / (1.0 + u)) ** m / (1.0 + u)
        return float(g @ wt)

    def __call__(self, y: float) -> float:
        y = float(y)
        if y < 0:
            raise DomainError("f_j is evaluated for y >= 0")
        if y in self._cache:
            return self._cache[y]
        if y >= 1.0:
            val = self.scaled(y) * y ** (-1.0 - self.s * (self.j + 1))
        else:
            tau, w = self._tau_grid(y)
            val = float((np.exp(-y * tau) * self._kernel(tau)) @ w)
            if y == 0:
                val += self._tail_at_zero(tau[-1] + 0.5 * (tau[-1] - tau[-2]))
        self._cache[y] = val
        return val

    def _tail_at_zero(self, T):
        # integrand ~ tau^{-1-p} (1 + O(1/tau)) beyond T with p = (1-2s)(j+1)
        p = self.small_y_exponent
        return T ** (-p) / p

    @property
    def singular_coefficient(self) -> float:
        """Gamma(-p), p = (1-2s)(j+1): the kernel tail tau^{-1-p} produces
        Gamma(-p) y^p in f_j (p not an integer)."""
        return float(gamma(-self.small_y_exponent))

    def singular_part(self, y):
        return self.singular_coefficient * np.asarray(y, dtype=float) ** self.small_y_exponent

    def smooth_part(self, y: float) -> float:
        """f_j(y) minus the leading y^p term; its next correction is O(y^{min(1, p+1)})."""
        return self(y) - float(self.singular_part(y))

    def drop_from_zero(self, y: float) -> float:
        """f_j(0) - f_j(y) computed directly as int (1 - e^{-y tau}) kernel."""
        tau, w = self._tau_grid(0.0)
        return float((-np.expm1(-y * tau) * self._kernel(tau)) @ w) + self._tail_drop(y, tau[-1])

    def _tail_drop(self, y, T):
        # beyond T, 1 - e^{-y tau} ~ 1 whenever y T >> 1; otherwise negligible tail mass
        p = self.small_y_exponent
        return T ** (-p) / p if y * T > 60 else 0.0


def f_j_eval(f: FjFunction, y: float) -> float:
    return f(y)


def a_coefficients(s: float, N: int, side: int) -> np.ndarray:
    """a_j^{+-}, j = 0..N, from 1/(1 - 2 c w + w^2) = sum_j a_j w^j with c = +-cos(pi s).

    Generated by the three-term recurrence that multiplying the geometric
    series out produces: a_0 = 1, a_1 = 2c, a_j = 2c a_{j-1} - a_{j-2}.
    """
    c = side * math.cos(math.pi * s)
    a = np.zeros(N + 1)
    a[0] = 1.0
    if N >= 1:
        a[1] = 2.0 * c
    for j in range(2, N + 1):
        a[j] = 2.0 * c * a[j - 1] - a[j - 2]
    return a


def branch_expansion(p: GreenParams, r: float, xn: float, N: int, side: int) -> float:
    """sum_{j<=N} 2 sin(pi s) a_j / b^{j+2} f_j(r|x_n|) / r^{(1-2s)(j+1)}."""
    a = a_coefficients(p.s, N, side)
    y = r * abs(xn)
    tot = 0.0
    for j in range(N + 1):
        tot += a[j] / p.b ** (j + 2) * FjFunction(j, p.s)(y) / r ** ((1.0 - 2.0 * p.s) * (j + 1))
    return 2.0 * math.sin(math.pi * p.s) * tot


# ---------------------------------------------------------------- assembly

def _heat_scale(p: GreenParams, rho: float, xn: float) -> float:
    """(2 pi)^n / b * p0(rho, x_n / b): transform of (2 pi / b) e^{-x_n r^{2s}/b}."""
    t = xn / p.b
    return (2.0 * math.pi) ** p.n / p.b * float(p0_subordination_array(p.s, p.n, np.array([rho]), t)[0])


def _remainder_symbol(p: GreenParams, xn: float, include_branch: bool = True, include_residue=True):
    """T(r, x_n) with the heat-kernel part of the residue removed (x_n > 0),
    or the full lower-half symbol (x_n < 0)."""
    s, b = p.s, p.b

    def T(r):
        r = np.asarray(r, dtype=float)
        if xn > 0:
            out = np.zeros_like(r)
            if include_residue:
                out += residue_array(s, b, r, xn) - 2.0 * math.pi / b * np.exp(-xn * r ** (2 * s) / b)
            if include_branch:
                out += np.exp(-r * xn) * branch_array(s, b, r, xn, 1)
            return out
        return np.exp(-r * abs(xn)) * branch_array(s, b, r, xn, -1)
    return T


def _radial_transform(p: GreenParams, rho: float, xn: float, T, cfg: QuadratureConfig,
                      estimate: bool = False):
    """(2 pi)^{(n-1)/2} rho^{-nu} int J_nu(r rho) r^{nu+1} T(r) dr.

    With ``estimate`` a pair (value, error estimate) is returned; on the axis
    the estimate compares two grid resolutions.
    """
    nu = p.nu
    pref = (2.0 * math.pi) ** (0.5 * (p.n - 1))
    beta_scale = p.b ** (-1.0 / (1.0 - 2.0 * p.s))
    if xn > 0:
        r_hi = max((60.0 * p.b / xn) ** (0.5 / p.s), 60.0 / xn)
    else:
        r_hi = 60.0 / abs(xn)
    if rho == 0.0:
        lo = 1e-12 * min(beta_scale, 1.0 / r_hi)
        def on_grid(panel):
            r, w = log_grid(lo, r_hi, panel, 16)
            return pref * float((bessel_j_scaled_origin(nu, r, 0.0) * r ** (nu + 1.0) * T(r)) @ w)
        val = on_grid(0.25)
        return (val, abs(val - on_grid(0.5))) if estimate else val

    def g(r):
        return r ** (nu + 1.0) * T(r) / rho ** nu

    pts = [beta_scale * 2.0 ** k for k in range(-12, 8)]
    pts += [min(r_hi, 1.0 / abs(xn)) * 2.0 ** k for k in range(-6, 1)]
    pts = [x for x in pts if x < 40.0 / rho]
    val, err = hankel_integral(g, nu, rho, cfg, points=pts)
    return (pref * val, pref * err) if estimate else pref * val


def assemble_E(p: GreenParams, pt: RadialPoint, cfg: QuadratureConfig | None = None) -> float:
    """E_{s,b} at (|x'|, x_n).  The plane x_n = 0 is rejected: the radial
    integrand loses its exponential damping there."""
    cfg = cfg or QuadratureConfig()
    rho, xn = float(pt.rho), float(pt.xn)
    if xn == 0:
        raise DomainError("assemble_E needs x_n != 0 (the origin and the plane x_n = 0 are excluded)")
    if xn > 0:
        return _heat_scale(p, rho, xn) + _radial_transform(p, rho, xn, _remainder_symbol(p, xn), cfg)
    return _radial_transform(p, rho, xn, _remainder_symbol(p, xn), cfg)


def assemble_E_detail(p: GreenParams, pt: RadialPoint, cfg: QuadratureConfig | None = None):
    """(E, error estimate of the radial quadrature)."""
    cfg = cfg or QuadratureConfig()
    rho, xn = float(pt.rho), float(pt.xn)
    if xn == 0:
        raise DomainError("x_n = 0 is excluded (the origin and the plane x_n = 0)")
    val, err = _radial_transform(p, rho, xn, _remainder_symbol(p, xn), cfg, estimate=True)
    if xn > 0:
        val += _heat_scale(p, rho, xn)
    return val, err


def residue_part(p: GreenParams, rho: float, xn: float, cfg: QuadratureConfig | None = None) -> float:
    """Contribution of the residue term H alone (x_n > 0)."""
    if not xn > 0:
        raise DomainError("the residue part exists only for x_n > 0")
    cfg = cfg or QuadratureConfig()
    T = _remainder_symbol(p, xn, include_branch=False)
    return _heat_scale(p, rho, xn) + _radial_transform(p, rho, xn, T, cfg)


# ------------------------------------------------------------- asymptotics

class Regime(str, Enum):
    UPPER_AXIS = "UpperAxis"
    LOWER_CONE = "LowerCone"
    GRAZING_UPPER = "GrazingUpper"


@dataclass(frozen=True)
class AsymptoticFitRecord:
    regime: Regime
    exponent: float
    constant: float
    residual: float
    expected: float
    samples: tuple = field(default=())
    values: tuple = field(default=())
    r_squared: float = math.nan
    reference: float = math.nan  # GrazingUpper: slope implied by the heat-kernel tail constant


DEFAULT_RAYS = {
    Regime.UPPER_AXIS: np.logspace(-4, -2, 7),
    Regime.LOWER_CONE: np.logspace(-8, -6, 7),
    Regime.GRAZING_UPPER: np.linspace(0.002, 0.02, 10),
}


def _fit_power(t, v):
    lt, lv = np.log(t), np.log(np.abs(v))
    A = np.vstack([lt, np.ones_like(lt)]).T
    coef = np.linalg.lstsq(A, lv, rcond=None)[0]
    return float(coef[0]), float(math.exp(coef[1])), float(np.max(np.abs(A @ coef - lv)))


def asymptotic_report(p: GreenParams, regime: Regime, cfg: QuadratureConfig | None = None,
                      samples=None, rho0: float = 1e-3, max_residual: float = 0.05,
                      min_r2: float = 0.999) -> AsymptoticFitRecord:
    """Fit the leading singular behavior along a ray, cone, or grazing family.

    UpperAxis: E(0, t), t -> 0+, expected exponent -(n-1)/(2s).
    LowerCone: E(t, -t), t -> 0+, expected exponent -(n-2+2s).
    GrazingUpper: at |x'| = rho0 and x_n = k rho0^{2s} the residue part
    times (x_n^{1/s} + |x'|^2)^{(n-1)/2} is fitted linearly in k; the slope
    is reported as ``constant`` and the fit quality as ``r_squared``.
    """
    cfg = cfg or QuadratureConfig()
    regime = Regime(regime)
    t = np.asarray(DEFAULT_RAYS[regime] if samples is None else samples, dtype=float)
    n, s = p.n, p.s
    if regime is Regime.UPPER_AXIS:
        v = np.array([assemble_E(p, RadialPoint(0.0, x), cfg) for x in t])
        expo, const, res = _fit_power(t, v)
        rec = AsymptoticFitRecord(regime, expo, const, res, -(n - 1) / (2 * s), tuple(t), tuple(v))
    elif regime is Regime.LOWER_CONE:
        v = np.array([assemble_E(p, RadialPoint(x, -x), cfg) for x in t])
        expo, const, res = _fit_power(t, v)
        rec = AsymptoticFitRecord(regime, expo, const, res, -(n - 2 + 2 * s), tuple(t), tuple(v))
    else:
        xs = t * rho0 ** (2 * s)
        v = np.array([residue_part(p, rho0, x, cfg) * (x ** (1 / s) + rho0 ** 2) ** (0.5 * (n - 1))
                      for x in xs])
        A = np.vstack([t, np.ones_like(t)]).T
        coef = np.linalg.lstsq(A, v, rcond=None)[0]
        pred = A @ coef
        ss_res = float(np.sum((v - pred) ** 2))
        ss_tot = float(np.sum((v - v.mean()) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
        rec = AsymptoticFitRecord(regime, 1.0, float(coef[0]), math.sqrt(ss_res / t.size), 1.0,
                                  tuple(t), tuple(v), r2,
                                  (2.0 * math.pi) ** n * tail_constant(s, n) / p.b ** 2)
        if r2 < min_r2:
            raise FitError(f"grazing linear fit R^2 = {r2:.6f} below {min_r2}")
        return rec
    if rec.residual > max_residual:
        raise FitError(f"{regime.value} log-log residual {rec.residual:.3e} exceeds {max_residual}")
    return rec


# ----------------------------------------------------------- frame coupling

def leading_kernel_at(flow, y, z, p_base: GreenParams, cfg: QuadratureConfig | None = None) -> float:
    """K(y, z) = E_{s, b(y)}(U(y) J(y) z) |det J(y)| with J the flow Jacobian."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if not np.any(z):
        raise DomainError("z must be nonzero")
    J = flow.jacobian(y)
    b, U = flow.frame(y)
    x = U @ (J @ z)
    pb = GreenParams(p_base.s, b, p_base.n)
    return assemble_E(pb, RadialPoint.from_cartesian(x), cfg) * abs(float(np.linalg.det(J)))


def drift_scaling(p: GreenParams) -> float:
    """lambda with E_{s,b}(x) = lambda^{n-2s} E_{s,1}(lambda x)."""
    return p.b ** (-1.0 / (1.0 - 2.0 * p.s))
