"""Acceptance suites: one function per criterion, each returning a SuiteResult
whose checks record the measured value, its threshold and the verdict."""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bessel_laplace import BesselLaplaceParams, eval_integral, gaussian_oracle, series_coefficients
from .config import QuadratureConfig
from .coordinates import (build_flow, catalog, fd_jacobian, frame_at, h_matrix,
                          verify_straightening)
from .errors import DomainError
from .green import (FjFunction, GreenParams, Regime, asymptotic_report, decomposition,
                    tau_integral_direct)
from .heat import (HeatKernelQuery, h_plus_profile, normalization, p0_hankel, p0_subordination,
                   poisson_oracle, spatial_decay_slope)
from .pole import large_beta_coefficients, large_beta_series, small_beta_series, solve_pole_array
from .spectral import SymbolSplit, apply_operator, random_field, regularity_experiment, solve_constant
from .subordinator import SubordinatorParams, laplace_check, mass, phi, phi_half_closed


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    relation: str = "<="


@dataclass
class SuiteResult:
    key: str
    title: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0
    time_limit: float = math.inf

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.runtime <= self.time_limit

    def add(self, name, value, threshold, relation="<="):
        value = float(value)
        ok = value <= threshold if relation == "<=" else value >= threshold
        self.checks.append(Check(name, value, float(threshold), bool(ok), relation))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = [c.name for c in self.checks if not c.passed]
        extra = f" failing: {', '.join(worst)}" if worst else ""
        if self.runtime > self.time_limit:
            extra += f" runtime {self.runtime:.1f}s > {self.time_limit:.0f}s"
        return f"[{status}] {self.key}: {self.title} ({self.runtime:.1f}s){extra}"

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def workers() -> int:
    env = os.environ.get("GREEN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise DomainError(f"GREEN_THREADS must be an integer, got {env!r}") from exc
    return min(4, os.cpu_count() or 1)


def pmap(fn, items):
    """Map over work items with a bounded thread pool; order of items is kept."""
    items = list(items)
    if workers() == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers()) as ex:
        return list(ex.map(fn, items))


def _timed(key, title, limit):
    def deco(fn):
        def run(**kw):
            res = SuiteResult(key, title, time_limit=limit)
            t = time.perf_counter()
            fn(res, **kw)
            res.runtime = time.perf_counter() - t
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return deco


def _ratio_error(measured, predicted):
    return abs(measured / predicted - 1.0)


# ----------------------------------------------------------------- 1. pole

def pole_decay_ratios(s, J):
    """Measured and predicted absolute-error reduction factors of both series:
    2^{(J+2)/s} for the small-beta series under beta -> beta/2 and
    2^{2J+3} for the large-beta series under beta -> 2 beta."""
    small = small_beta_series(s, J)
    beta = 0.25 * 2.0 ** -np.arange(2)
    _, c = solve_pole_array(s, beta)
    err = np.abs(small.complement(beta) - c)
    small_ratio = err[0] / err[1]
    large = large_beta_series(s, J)
    beta = 4.0 * 2.0 ** np.arange(2)
    y, _ = solve_pole_array(s, beta)
    err = np.abs(large.evaluate(beta) - y)
    large_ratio = err[0] / err[1]
    return small_ratio, 2.0 ** ((J + 2) / s), large_ratio, 2.0 ** (2 * J + 3)


@_timed("pole", "pole equation root and series orders", 5.0)
def suite_pole(res):
    s_grid = np.linspace(0.05, 0.95, 20)
    beta_grid = np.logspace(-6, 6, 20)
    worst = 0.0
    for s in s_grid:
        y, c = solve_pole_array(float(s), beta_grid)
        worst = max(worst, float(np.max(np.abs((c * (2 - c)) ** s - beta_grid * y))))
    res.add("root residual on 20x20 grid", worst, 1e-12)
    worst_ratio = 0.0
    # rational s with small denominators make individual coefficients vanish
    # (b_2 = s(5s-1)/2 is zero at s = 1/5), so the sample avoids them
    for s in (0.23, 0.31, 0.43):
        for J in (0, 1, 2):
            sm, sp, lg, lp = pole_decay_ratios(s, J)
            worst_ratio = max(worst_ratio, _ratio_error(sm, sp), _ratio_error(lg, lp))
    res.add("series decay ratio relative error", worst_ratio, 0.2)
    b1 = max(abs(large_beta_coefficients(s, 1)[0] + s) for s in (0.1, 0.2, 0.3, 0.4))
    res.add("|b_1 + s|", b1, 1e-6)


# ---------------------------------------------------------- 2. subordinator

@_timed("subordinator", "stable subordinator density", 10.0)
def suite_subordinator(res):
    worst = max(laplace_check_s(s, lam) for s in (0.3, 0.5, 0.7) for lam in (0.5, 1.0, 2.0))
    res.add("Laplace identity discrepancy", worst, 1e-6)
    x = np.linspace(0.1, 10.0, 200)
    res.add("s=1/2 closed form", float(np.max(np.abs(phi(0.5, x) - phi_half_closed(x)))), 1e-8)
    res.add("|mass - 1|", max(abs(mass(s) - 1.0) for s in (0.3, 0.5, 0.7)), 1e-5)


def laplace_check_s(s, lam):
    return laplace_check(SubordinatorParams(s), lam)


# -------------------------------------------------------- 3. Bessel-Laplace

def bessel_laplace_ratios(s, nu=0.0, lam=0.02):
    """Remainder reduction factors R_K(lam)/R_K(lam/2) for K = 1, 2, 3."""
    out = {}
    vals = {}
    for l in (lam, lam / 2):
        vals[l] = eval_integral(BesselLaplaceParams(s, nu, l))[0]
    mu = series_coefficients(s, nu, 3)
    for K in (1, 2, 3):
        rem = [vals[l] - float(np.sum(mu[:K] * l ** np.arange(1, K + 1))) for l in (lam, lam / 2)]
        out[K] = (rem[0] / rem[1], 2.0 ** (K + 1))
    return out


@_timed("bessel_laplace", "Bessel-Laplace integral", 30.0)
def suite_bessel_laplace(res):
    worst = 0.0
    for nu in (0.0, 0.5, 1.0):
        for alpha in (0.1, 0.5, 2.0):
            v = eval_integral(BesselLaplaceParams(1.0, nu, alpha))[0]
            g = gaussian_oracle(nu, alpha)
            worst = max(worst, abs(v - g) / abs(g))
    res.add("Gaussian identity relative error", worst, 1e-8)
    worst = 0.0
    for s in (0.2, 0.3):
        for K, (m, p) in bessel_laplace_ratios(s).items():
            worst = max(worst, _ratio_error(m, p))
    res.add("order-check ratio relative error", worst, 0.2)


# ------------------------------------------------------------ 4. heat kernel

HEAT_S = (0.3, 0.5, 0.7)
HEAT_RHO = (0.0, 0.3, 1.0, 2.0, 5.0)
HEAT_XN = (0.1, 0.5, 1.0, 2.0, 4.0)


@_timed("heat", "anisotropic heat kernel", 120.0)
def suite_heat(res):
    grid = [(s, rho, xn) for s in HEAT_S for rho in HEAT_RHO for xn in HEAT_XN]

    def diff(item):
        q = HeatKernelQuery(item[0], 3, item[1], item[2])
        a, b = p0_hankel(q), p0_subordination(q)
        return abs(a - b), abs(a - b) / max(abs(b), 1e-300)
    d = np.array(pmap(diff, grid))
    res.add("Hankel vs subordination (absolute)", float(d[:, 0].max()), 1e-5)
    res.add("Hankel vs subordination (relative)", float(d[:, 1].max()), 1e-5)
    worst = 0.0
    for s in HEAT_S:
        for mu in (0.5, 2.0, 3.0):
            base = p0_subordination(HeatKernelQuery(s, 3, 0.7, 0.8))
            scaled = p0_subordination(HeatKernelQuery(s, 3, 0.7 * mu, 0.8 * mu ** (2 * s)))
            worst = max(worst, abs(scaled * mu ** 2 / base - 1.0))
    res.add("anisotropic homogeneity", worst, 1e-8)
    rho = np.array(HEAT_RHO)
    pois = max(abs(p0_subordination(HeatKernelQuery(0.5, 3, r, t)) - float(poisson_oracle(r, t)))
               for r in rho for t in (0.5, 1.0, 2.0))
    res.add("Poisson oracle (s=1/2)", pois, 1e-6)
    res.add("|normalization - 1|", max(abs(normalization(s, 3, 1.0) - 1.0) for s in HEAT_S), 1e-4)
    lam = np.logspace(4, 8, 9)
    slope_err = max(abs(h_plus_profile(HeatKernelQuery(s, 3, 0.0, 1.0), lam).slope + s)
                    for s in HEAT_S)
    res.add("H+ tail slope error", slope_err, 0.05)
    spat = max(abs(spatial_decay_slope(s, 3, 1.0, np.logspace(3, 4, 9)) + (2 + 2 * s))
               for s in HEAT_S)
    res.add("spatial decay slope error", spat, 0.05)


# -------------------------------------------------------------- 5. contour

CONTOUR_S = (0.15, 0.3, 0.45)
CONTOUR_R = (0.5, 1.0, 4.0)
CONTOUR_XN = (-1.0, -0.1, 0.1, 1.0)


def contour_sweep(s_values=CONTOUR_S, b=1.0):
    """Rows (s, r, xn, direct, decomposition, |difference|)."""
    items = [(s, r, xn) for s in s_values for r in CONTOUR_R for xn in CONTOUR_XN]

    def one(item):
        s, r, xn = item
        p = GreenParams(s, b, 3)
        d, c = tau_integral_direct(p, r, xn), decomposition(p, r, xn)
        return (s, r, xn, d, c, abs(d - c))
    return sorted(pmap(one, items))


@_timed("contour", "contour identity for the tau integral", 120.0)
def suite_contour(res, s_values=CONTOUR_S):
    rows = contour_sweep(s_values)
    res.add(f"max identity residual over {len(rows)} points", max(r[-1] for r in rows), 1e-6)


# ------------------------------------------------------- 6. Green asymptotics

@_timed("green_asymptotics", "two-sided singularity of the kernel", 300.0)
def suite_green_asymptotics(res, s=0.3, n=3):
    p = GreenParams(s, 1.0, n)
    cfg = QuadratureConfig()
    recs = pmap(lambda reg: asymptotic_report(p, reg, cfg, max_residual=math.inf, min_r2=0.0),
                [Regime.LOWER_CONE, Regime.UPPER_AXIS, Regime.GRAZING_UPPER])
    low, up, gr = recs
    res.add("lower-cone exponent error", abs(low.exponent - low.expected), 0.05)
    res.add("upper-axis exponent error", abs(up.exponent - up.expected), 0.05)
    res.add("grazing linear fit R^2", gr.r_squared, 0.999, ">=")
    f0 = FjFunction(0, s)
    res.add("f_0 large-y constant relative error", abs(f0.scaled(1e6) / f0.large_y_constant - 1.0), 1e-4)


# ------------------------------------------------------------ 7. spectral

@_timed("spectral", "pseudo-spectral regularity gain", 60.0)
def suite_spectral(res, s=0.3, b=1.0, l=1.0, seed=0):
    sym = SymbolSplit(s, b)
    worst = 0.0
    for n, N in ((2, 64), (2, 128), (3, 32)):
        u = random_field(n, N, seed)
        back = solve_constant(apply_operator(u, sym), sym)
        worst = max(worst, float(np.max(np.abs(back.coeffs - u.coeffs))))
    res.add("roundtrip solve(apply(u)) - u", worst, 1e-12)
    rep = regularity_experiment(sym, l, (64, 128), n=2, seed=seed)
    res.add("drift-orthogonal gain error |gain - 2s|", abs(rep.gain_orthogonal - 2 * s), 0.1)
    res.add("drift-axis gain error |gain - 1|", abs(rep.gain_axis - 1.0), 0.1)
    res.add("H^{l+2s}/H^l ratio variation N=64..128", rep.ratio_variation, 0.05)


# --------------------------------------------------------- 8. coordinates

def coordinate_residuals(name="rotational", seed=3):
    """Residual dictionary for one catalog field."""
    d = catalog(name)
    chart = build_flow(d)
    rng = np.random.default_rng(seed)
    r0 = chart.r0
    pts = rng.uniform(-1, 1, (8, d.n)) * r0 / math.sqrt(d.n) * 0.9

    def u(x):
        return math.sin(x[0]) * math.cos(x[-1])

    def grad_u(x):
        g = np.zeros(d.n)
        g[0] = math.cos(x[0]) * math.cos(x[-1])
        g[-1] -= math.sin(x[0]) * math.sin(x[-1])
        return g
    out = {"r_bar": chart.r_bar, "r0": r0, "contraction": chart.contraction, "C": chart.C}
    out["straightening"] = verify_straightening(chart, d, u, pts, grad_u).max_residual
    jac = secant = frame = group = 0.0
    for y in pts:
        J = chart.jacobian(y)
        jac = max(jac, float(np.max(np.abs(J - fd_jacobian(chart.phi, y, 1e-5)))))
        w = pts[0] * 0.5 - y * 0.3
        H = h_matrix(chart, w, y).matrix
        secant = max(secant, float(np.max(np.abs(chart.phi(y) - chart.phi(w) - H @ (y - w)))))
        b, U = frame_at(chart, y)
        chi = rng.standard_normal(d.n)
        frame = max(frame, abs(b * (U @ chi)[-1] - (J.T @ chi)[-1]))
        h = 0.05
        y2 = y.copy()
        y2[-1] += h
        group = max(group, float(np.max(np.abs(chart.flow_from(chart.phi(y), h) - chart.phi(y2)))))
    out.update(jacobian_fd=jac, secant=secant, frame=frame, flow_group=group)
    return out


@_timed("coordinates", "drift-straightening chart", 10.0)
def suite_coordinates(res):
    r = coordinate_residuals("rotational")
    res.add("straightening residual", r["straightening"], 1e-6)
    res.add("Jacobian vs finite differences", r["jacobian_fd"], 1e-6)
    res.add("secant identity", r["secant"], 1e-8)
    res.add("frame relation", r["frame"], 1e-12)
    res.add("flow-group property", r["flow_group"], 1e-8)


SUITES = {
    "pole": suite_pole,
    "subordinator": suite_subordinator,
    "bessel_laplace": suite_bessel_laplace,
    "heat": suite_heat,
    "contour": suite_contour,
    "green_asymptotics": suite_green_asymptotics,
    "spectral": suite_spectral,
    "coordinates": suite_coordinates,
}


def run_suite(name: str, **kw) -> SuiteResult:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; valid suites: {', '.join(SUITES)}")
    return SUITES[name](**kw)


def run_all_suites(names=None) -> list:
    names = list(SUITES) if names is None else list(names)
    for nm in names:
        if nm not in SUITES:
            raise DomainError(f"unknown suite {nm!r}; valid suites: {', '.join(SUITES)}")
    return [run_suite(nm) for nm in names]
