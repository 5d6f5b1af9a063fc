"""Quadrature building blocks shared by the kernel modules.

Everything here is vectorized over intervals: an integrand ``f`` receives a
numpy array of abscissae and must return values of the same shape.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .config import QuadratureConfig
from .errors import ConvergenceError
from .special import bessel_zeros

# Gauss-Kronrod 15/7 nodes and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss weights sit on the odd-indexed Kronrod nodes 1, 3, 5, 7 (and mirror).
_G_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_G_WEIGHTS = np.array([_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]])


def gk15(f, a, b):
    """Fixed 15-point Kronrod rule on each interval [a_i, b_i].

    Returns (kronrod, error) arrays; the error uses the QUADPACK rescaling of
    |kronrod - gauss| against the mean absolute deviation of f.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * GK_NODES[None, :]
    fx = f(x)
    k = h * (fx @ GK_WEIGHTS)
    g = h * (fx[:, _G_IDX] @ _G_WEIGHTS)
    mean = k / np.where(h == 0, 1.0, 2.0 * h)
    resasc = np.abs(h) * (np.abs(fx - mean[:, None]) @ GK_WEIGHTS)
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & np.isfinite(scaled), scaled, err)
    return k, np.maximum(err, 50 * np.finfo(float).eps * np.abs(k))


def adaptive(f, a, b, cfg: QuadratureConfig | None = None, points=None):
    """Globally adaptive GK15 on a finite interval.

    While the summed error estimate exceeds the tolerance, every interval
    carrying more than its equal share of the budget is bisected.
    ``points`` are interior breakpoints (kinks, etc.).
    Returns (value, error_estimate).
    """
    cfg = cfg or QuadratureConfig()
    edges = [a] + sorted(p for p in (points or []) if a < p < b) + [b]
    lo = np.array(edges[:-1], dtype=float)
    hi = np.array(edges[1:], dtype=float)
    val, err = gk15(f, lo, hi)
    for _ in range(4 * cfg.max_depth):
        total = float(val.sum())
        tol = cfg.tol(total)
        if err.sum() <= tol:
            return total, float(err.sum())
        split = err > tol / (2 * err.size)
        if lo.size + split.sum() > 100000:
            break
        mid = 0.5 * (lo[split] + hi[split])
        v1, e1 = gk15(f, lo[split], mid)
        v2, e2 = gk15(f, mid, hi[split])
        keep = ~split
        lo = np.concatenate([lo[keep], lo[split], mid])
        hi = np.concatenate([hi[keep], mid, hi[split]])
        val = np.concatenate([val[keep], v1, v2])
        err = np.concatenate([err[keep], e1, e2])
    raise ConvergenceError(
        f"adaptive GK15 did not converge on [{a}, {b}]: error {err.sum():.3e}"
    )


def integrate_panels(f, edges, cfg: QuadratureConfig | None = None):
    """Integral over each panel [edges[i], edges[i+1]].

    One GK15 pass on every panel; panels whose error estimate is too large
    are refined individually with :func:`adaptive`.
    """
    cfg = cfg or QuadratureConfig()
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    val, err = gk15(f, lo, hi)
    scale = np.abs(val).max() if val.size else 0.0
    bad = np.nonzero(err > cfg.tol(scale))[0]
    for i in bad:
        val[i] = adaptive(f, lo[i], hi[i], cfg)[0]
    return val


@lru_cache(maxsize=32)
def gauss_legendre(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


def log_grid(lo: float, hi: float, panel: float = 0.5, nodes: int = 16):
    """Nodes and weights of composite Gauss-Legendre in t = log(sigma).

    Returns (sigma, weights) with weights already containing dsigma = sigma dt.
    """
    t0, t1 = math.log(lo), math.log(hi)
    npan = max(1, int(math.ceil((t1 - t0) / panel)))
    edges = np.linspace(t0, t1, npan + 1)
    x, w = gauss_legendre(nodes)
    h = 0.5 * np.diff(edges)
    t = (0.5 * (edges[:-1] + edges[1:]))[:, None] + h[:, None] * x[None, :]
    sig = np.exp(t).ravel()
    wt = (h[:, None] * w[None, :]).ravel() * sig
    return sig, wt


def linear_grid(lo: float, hi: float, panels: int, nodes: int = 16):
    edges = np.linspace(lo, hi, panels + 1)
    x, w = gauss_legendre(nodes)
    h = 0.5 * np.diff(edges)
    t = (0.5 * (edges[:-1] + edges[1:]))[:, None] + h[:, None] * x[None, :]
    return t.ravel(), (h[:, None] * w[None, :]).ravel()


# ---------------------------------------------------------------- acceleration

def euler_average(partial_sums):
    """Repeated pairwise averaging of S_{N/2}, ..., S_N.

    For alternating tails this cancels the oscillation order by order.
    """
    s = np.asarray(partial_sums, dtype=float)
    s = s[len(s) // 2:]
    while s.size > 1:
        s = 0.5 * (s[1:] + s[:-1])
    return float(s[0])


def wynn_epsilon(partial_sums, depth: int = 30):
    """Shanks transformation via Wynn's epsilon algorithm on the last terms."""
    s = [float(v) for v in partial_sums[-(depth + 1):]]
    if len(s) < 3:
        return s[-1]
    prev = [0.0] * (len(s) + 1)
    cur = list(s)
    best = s[-1]
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0.0:
                nxt.append(math.inf)
            else:
                nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0 and cur and math.isfinite(cur[-1]):
            best = cur[-1]
    return best


def accelerate(partial_sums, method: str = "euler"):
    if method == "shanks":
        return wynn_epsilon(partial_sums)
    return euler_average(partial_sums)


def alternating_tail(panel_fn, cfg: QuadratureConfig | None = None, base: float = 0.0,
                     damping=None, stall: int = 8):
    """Sum base + sum_k panel_fn(k) over panel indices k = 0, 1, 2, ...

    ``panel_fn`` takes an integer array of indices and returns panel
    integrals.  Panels are added in blocks; after every block the partial
    sums are accelerated, and the result is returned once ``cfg.agree``
    consecutive estimates agree to within the tolerance.  The tolerance is
    never taken below the rounding floor 64 eps max|S_k| that cancellation
    between large partial sums imposes.

    If the spread stops improving for ``stall`` blocks the best estimate so
    far is returned, provided its spread is within 1e3 times the
    tolerance; otherwise ConvergenceError.  ``damping(k)`` may bound the
    absolute remainder after panel k; once it is below tolerance the plain
    partial sum is returned.  Returns (value, error_estimate, panels_used).
    """
    cfg = cfg or QuadratureConfig()
    sums = [base]
    history = []
    best = (math.inf, None)
    since_best = 0
    amp = abs(base)
    k = 0
    while k < cfg.max_panels:
        idx = np.arange(k, k + cfg.block)
        vals = panel_fn(idx)
        part = sums[-1] + np.cumsum(vals)
        sums.extend(part.tolist())
        amp = max(amp, float(np.abs(part).max()))
        k += cfg.block
        floor = 64 * np.finfo(float).eps * amp
        if damping is not None:
            bound = damping(k)
            if bound < max(cfg.tol(sums[-1]), floor):
                return sums[-1], bound + floor, k
        est = accelerate(sums, cfg.acceleration)
        history.append(est)
        if len(history) < cfg.agree:
            continue
        recent = history[-cfg.agree:]
        spread = max(recent) - min(recent)
        tol = max(cfg.tol(est), floor)
        if spread <= tol:
            return est, spread, k
        if spread < best[0]:
            best = (spread, est, tol, k)
            since_best = 0
        else:
            since_best += 1
            if since_best >= stall:
                break
    if best[1] is not None and best[0] <= 1e3 * best[2]:
        return best[1], best[0], best[3]
    raise ConvergenceError(
        f"oscillatory tail did not settle (best spread {best[0]:.3e} after {k} panels)"
    )


def hankel_integral(g, nu: float, rho: float, cfg: QuadratureConfig | None = None,
                    points=None, damping=None):
    """Integral of J_nu(rho r) g(r) over r in (0, inf).

    The half-line is split at the Bessel zeros j_{nu,k}/rho.  Everything up
    to the first zero beyond max(points) is one adaptive integral with the
    given breakpoints (use them to resolve structure of g near the origin);
    the remaining panels go through :func:`integrate_panels` and their
    alternating sums through :func:`alternating_tail`.  ``damping(R)`` is an
    optional bound on |int_R^inf|.  Returns (value, error_estimate).
    """
    from .special import bessel_j

    cfg = cfg or QuadratureConfig()
    if not rho > 0:
        raise ValueError("hankel_integral needs rho > 0")

    def f(r):
        return bessel_j(nu, rho * r) * g(r)

    zeros = [0.0]

    def edge(kmax):
        while len(zeros) <= kmax + 1:
            new = bessel_zeros(nu, 256, start=len(zeros)) / rho
            zeros.extend(new.tolist())
        return zeros

    pts = sorted(p for p in (points or []) if p > 0)
    reach = pts[-1] if pts else 0.0
    start = 1
    while edge(start)[start] <= reach:
        start += 1
    head_end = zeros[start]
    head_pts = sorted(set(pts + [z for z in zeros[1:start]]))
    head_val, head_err = adaptive(f, 0.0, head_end, cfg, points=head_pts)

    def panels(idx):
        z = edge(start + int(idx[-1]) + 2)
        e = np.array(z[start + idx[0]: start + idx[-1] + 2])
        return integrate_panels(f, e, cfg)

    dmp = None
    if damping is not None:
        def dmp(k):
            return damping(edge(start + k)[start + k])
    val, err, _ = alternating_tail(panels, cfg, base=head_val, damping=dmp)
    return val, err + head_err
