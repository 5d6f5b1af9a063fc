import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import j0

from fracdrift.config import RadialPoint
from fracdrift.coordinates import FlowConfig, build_flow, catalog
from fracdrift.errors import DomainError
from fracdrift.green import (
    FjFunction,
    GreenParams,
    Regime,
    a_coefficients,
    assemble_E,
    assemble_E_detail,
    asymptotic_report,
    branch_expansion,
    branch_integral,
    contour_pieces,
    decomposition,
    drift_scaling,
    f_j_eval,
    leading_kernel_at,
    residue_part,
    residue_term,
    tau_integral_direct,
)
from fracdrift.heat import tail_constant
from fracdrift.pole import PoleParams, solve_pole

P = GreenParams(0.3, 1.0, 3)


# ------------------------------------------------------------ contour identity

@settings(max_examples=30, deadline=None)
@given(
    s=st.sampled_from([0.15, 0.3, 0.45]),
    b=st.floats(0.5, 2.0),
    r=st.floats(0.2, 5.0),
    xn=st.floats(0.1, 2.0),
    lower=st.booleans(),
)
def test_contour_identity(s, b, r, xn, lower):
    p = GreenParams(s, b, 3)
    x = -xn if lower else xn
    assert tau_integral_direct(p, r, x) == pytest.approx(decomposition(p, r, x), abs=1e-6)


def test_contour_pieces_total():
    pc = contour_pieces(P, 1.0, 0.5)
    assert pc.total == pytest.approx(decomposition(P, 1.0, 0.5), rel=1e-14)
    assert math.isnan(contour_pieces(P, 1.0, -0.5).residue)


# ---------------------------------------------------------------- residue

def test_residue_closed_form():
    y = solve_pole(PoleParams(0.3, 1.0))
    expect = 2 * math.pi * math.exp(-y) * (1 - y * y) / (1 - 0.4 * y * y)
    assert residue_term(P, 1.0, 1.0) == pytest.approx(expect, rel=1e-13)


def test_residue_large_r_limit():
    p = GreenParams(0.3, 1.5, 3)
    xn = 1e-3
    ratios = [residue_term(p, r, xn) * p.b / (2 * math.pi) * math.exp(r ** 0.6 * xn / p.b)
              for r in (1e2, 1e4, 1e6)]
    assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)
    assert ratios[-1] == pytest.approx(1.0, abs=1e-3)


def test_residue_domain():
    with pytest.raises(DomainError):
        residue_term(P, 1.0, -0.1)
    with pytest.raises(DomainError):
        residue_term(P, 0.0, 0.1)


# --------------------------------------------------------------- branches

@pytest.mark.parametrize("side", [1, -1])
def test_branch_limit_two_resolutions(side):
    a = branch_integral(P, 1e-6, 0.0, side, nodes=16, panel=0.5)
    b = branch_integral(P, 1e-6, 0.0, side, nodes=24, panel=0.25)
    assert np.isfinite(a) and a > 0
    assert a == pytest.approx(b, abs=1e-8)


@pytest.mark.parametrize("side", [1, -1])
@pytest.mark.parametrize("r, xn", [(0.5, 0.3), (2.0, 1.0), (1.0, 0.0)])
def test_branch_tau_form(side, r, xn):
    # sigma = r (tau - 1) turns the sigma integral into one over tau > 1
    s, b = P.s, P.b
    cs = math.cos(math.pi * s)

    def f(tau):
        Pv = r ** (2 * s) * (tau - 1) ** s * (tau + 1) ** s
        Qv = b * r * tau
        return r * math.exp(-abs(xn) * r * (tau - 1)) * Pv / (Pv * Pv + Qv * Qv - side * 2 * Pv * Qv * cs)

    ref = sum(quad(f, a, c, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
              for a, c in [(1, 2), (2, 100), (100, np.inf)])
    ref *= 2 * math.sin(math.pi * s)
    assert branch_integral(P, r, xn, side) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("side", [1, -1])
def test_branch_decreases_in_distance(side):
    v = [branch_integral(P, 1.3, side * x, side) for x in (0.1, 0.4, 1.6, 6.4)]
    assert all(a > b for a, b in zip(v, v[1:]))


def test_branch_rejects_bad_side():
    with pytest.raises(DomainError):
        branch_integral(P, 1.0, 1.0, 0)


# ------------------------------------------------------------------- f_j

def test_fj_large_y_constant():
    f = FjFunction(0, 0.3)
    assert f.large_y_constant == pytest.approx(2 ** 0.3 * math.gamma(1.3), rel=1e-14)
    assert f.large_y_constant == pytest.approx(1.1049, abs=1e-4)
    assert f.scaled(1e5) == pytest.approx(f.large_y_constant, rel=1e-4)
    y = 1e3
    assert f(y) * y ** 1.3 == pytest.approx(f.scaled(y), rel=1e-12)


@pytest.mark.parametrize("j", [0, 1, 3])
def test_fj_against_scipy(j):
    s = 0.3
    f = FjFunction(j, s)
    k = lambda t: (t ** s * (t + 2) ** s / (t + 1)) ** (j + 1) / (t + 1)
    for y in (0.05, 0.7, 3.0):
        ref = quad(lambda t: math.exp(-y * t) * k(t), 0, np.inf, limit=400, epsrel=1e-12)[0]
        assert f_j_eval(f, y) == pytest.approx(ref, rel=1e-8)


def test_fj_at_zero_two_resolutions():
    f = FjFunction(0, 0.3)
    k = lambda t: (t ** 0.3 * (t + 2) ** 0.3 / (t + 1)) / (t + 1)
    ref = sum(quad(k, a, c, limit=400, epsabs=1e-13)[0] for a, c in [(0, 1), (1, 1e3), (1e3, np.inf)])
    assert f(0.0) == pytest.approx(ref, abs=1e-8)
    assert f(0.0) > 0


def test_fj_small_y_exponent():
    f = FjFunction(0, 0.3)
    y = np.logspace(-8, -5, 7)
    d = np.array([f.drop_from_zero(v) for v in y])
    slope = np.polyfit(np.log(y), np.log(d), 1)[0]
    assert slope == pytest.approx(f.small_y_exponent, abs=0.05)
    assert f.small_y_exponent == pytest.approx(0.4)


def test_fj_singular_split_for_large_exponent():
    # p = 1.2 > 1: the linear term hides y^p in f(0) - f(y), the split exposes it
    f = FjFunction(1, 0.2)
    y = np.array([1e-4, 2e-4])
    sm = np.array([f.smooth_part(v) for v in y])
    s0 = f(0.0)
    slopes = (s0 - sm) / y
    assert slopes[0] == pytest.approx(slopes[1], rel=1e-2)


@pytest.mark.parametrize("j", [0, 2])
def test_fj_derivative_bounds(j):
    f = FjFunction(j, 0.3)
    a = 1 + 0.3 * (j + 1)
    ys = np.logspace(0, 3, 10)
    v0 = np.array([f(y) for y in ys]) * ys ** a
    h = 1e-4 * ys
    d1 = np.array([(f(y + e) - f(y - e)) / (2 * e) for y, e in zip(ys, h)]) * ys ** (a + 1)
    assert np.all(v0 > 0) and v0.max() < 2 * f.large_y_constant
    assert np.abs(d1).max() < 2 * a * f.large_y_constant


def test_fj_validation():
    with pytest.raises(DomainError):
        FjFunction(-1, 0.3)
    with pytest.raises(DomainError):
        FjFunction(0, 0.5)
    with pytest.raises(DomainError):
        FjFunction(0, 0.3)(-1.0)


# ----------------------------------------------------- expansion coefficients

@pytest.mark.parametrize("side", [1, -1])
def test_a_coefficients_closed_form(side):
    s = 0.3
    j = np.arange(12)
    closed = side ** j * np.sin((j + 1) * math.pi * s) / math.sin(math.pi * s)
    assert np.allclose(a_coefficients(s, 11, side), closed, atol=1e-12)


@pytest.mark.parametrize("side", [1, -1])
@pytest.mark.parametrize("N", [0, 1, 2])
def test_branch_remainder_order(side, N):
    # y = r|x_n| held fixed so that only the power of r is probed
    r = 2.0 ** np.arange(5, 12)
    q = np.array([abs(branch_integral(P, x, side / x, side) - branch_expansion(P, x, side / x, N, side))
                  * x ** ((1 - 2 * P.s) * (N + 2)) for x in r])
    assert np.all(q > 0) and q.max() / q.min() < 3


# --------------------------------------------------------------- assembly

def lower_oracle(p, rho, xn):
    # radial transform of the brute-force tau integral, all by scipy
    g = lambda r: tau_integral_direct(p, r, xn) * r * j0(r * rho) if r > 0 else 0.0
    L = 1 / abs(xn)
    edges = [0, 1, 10, 40 * L, 80 * L]
    return 2 * math.pi * sum(quad(g, a, c, limit=200, epsabs=1e-12, epsrel=1e-11)[0]
                             for a, c in zip(edges, edges[1:]))


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("rho, xn", [(0.0, -0.3), (0.5, -0.5)])
def test_lower_half_against_direct_route(rho, xn):
    assert assemble_E(P, RadialPoint(rho, xn)) == pytest.approx(lower_oracle(P, rho, xn), rel=1e-9)


@pytest.mark.slow
def test_upper_axis_against_direct_route():
    s, xn = P.s, 2.0
    g = lambda r: (tau_integral_direct(P, r, xn) - 2 * math.pi * math.exp(-xn * r ** (2 * s))) * r \
        if r > 0 else 0.0
    edges = [0, 1, 10, 100, 1e3, 1e4]
    parts = sum(quad(g, a, c, limit=400, epsabs=1e-12, epsrel=1e-11)[0] for a, c in zip(edges, edges[1:]))
    ref = 2 * math.pi * (parts + 2 * math.pi * math.gamma(1 / s) / (2 * s * xn ** (1 / s)))
    assert assemble_E(P, RadialPoint(0.0, xn)) == pytest.approx(ref, rel=1e-8)


def test_detail_matches_value():
    pt = RadialPoint(0.4, 0.7)
    v, err = assemble_E_detail(P, pt)
    assert v == pytest.approx(assemble_E(P, pt), rel=1e-10)
    assert err < 1e-6 * abs(v)


def test_upper_half_dominates_near_origin():
    h = 1e-3
    up = assemble_E(P, RadialPoint(h, h ** (2 * P.s)))
    down = assemble_E(P, RadialPoint(h, -h))
    assert abs(up) > 10 * abs(down)


def test_drift_scaling_identity():
    b = 2.0
    lam = drift_scaling(GreenParams(0.3, b, 3))
    assert lam == pytest.approx(b ** (-1 / 0.4))
    for rho, xn in [(0.3, 0.8), (0.5, -0.6)]:
        lhs = assemble_E(GreenParams(0.3, b, 3), RadialPoint(rho, xn))
        rhs = lam ** (3 - 0.6) * assemble_E(P, RadialPoint(lam * rho, lam * xn))
        assert lhs == pytest.approx(rhs, rel=1e-7)


def test_two_dimensional_kernel_is_finite():
    p = GreenParams(0.3, 1.0, 2)
    for pt in (RadialPoint(0.5, 0.5), RadialPoint(0.5, -0.5)):
        assert np.isfinite(assemble_E(p, pt))


def test_assembly_domain_errors():
    with pytest.raises(DomainError):
        assemble_E(P, RadialPoint(0.5, 0.0))
    with pytest.raises(DomainError):
        residue_part(P, 0.5, -1.0)
    with pytest.raises(DomainError):
        GreenParams(0.5, 1.0, 3)
    with pytest.raises(DomainError):
        GreenParams(0.3, -1.0, 3)


# ------------------------------------------------------------- asymptotics

def test_upper_axis_exponent():
    rec = asymptotic_report(P, Regime.UPPER_AXIS)
    assert rec.exponent == pytest.approx(rec.expected, abs=0.05)
    assert rec.expected == pytest.approx(-2 / 0.6)


def test_lower_cone_exponent():
    rec = asymptotic_report(P, Regime.LOWER_CONE)
    assert rec.exponent == pytest.approx(-(1 + 0.6), abs=0.05)


def test_grazing_linear_coefficient():
    rec = asymptotic_report(P, "GrazingUpper")
    assert rec.r_squared >= 0.999
    assert rec.reference == pytest.approx((2 * math.pi) ** 3 * tail_constant(0.3, 3))
    assert rec.constant == pytest.approx(rec.reference, rel=0.05)


def test_unknown_regime():
    with pytest.raises(ValueError):
        asymptotic_report(P, "Sideways")


# ------------------------------------------------------------- frame coupling

def test_leading_kernel_constant_drift():
    chart = build_flow(catalog("constant"), FlowConfig())
    z = np.array([0.2, -0.1, 0.3])
    k = leading_kernel_at(chart, np.zeros(3), z, P)
    assert k == pytest.approx(assemble_E(P, RadialPoint.from_cartesian(z)), rel=1e-12)


def test_leading_kernel_uses_local_drift():
    chart = build_flow(catalog("affine"), FlowConfig())
    y = np.array([0.05, -0.02, 0.03])
    J = chart.jacobian(y)
    b, U = chart.frame(y)
    assert b == pytest.approx(np.linalg.norm(J[:, -1]), rel=1e-10)
    z = np.array([0.1, 0.05, -0.2])
    x = U @ (J @ z)
    expect = assemble_E(GreenParams(0.3, b, 3), RadialPoint.from_cartesian(x)) * abs(np.linalg.det(J))
    assert leading_kernel_at(chart, y, z, P) == pytest.approx(expect, rel=1e-12)
    with pytest.raises(DomainError):
        leading_kernel_at(chart, y, np.zeros(3), P)
