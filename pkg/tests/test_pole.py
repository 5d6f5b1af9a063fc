import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracdrift.errors import ConvergenceError, DomainError
from fracdrift.pole import (
    PoleParams,
    Regime,
    large_beta_coefficients,
    large_beta_series,
    radius_estimate,
    small_beta_coefficients,
    small_beta_series,
    solve_pole,
    solve_pole_array,
    solve_pole_root,
)


@pytest.mark.parametrize(
    "s, beta, y",
    [
        (0.25, 2.0 ** 0.25, 1.0 / math.sqrt(2.0)),
        (0.3, 0.64 ** 0.3 / 0.6, 0.6),
    ],
)
def test_closed_form_roots(s, beta, y):
    assert solve_pole(PoleParams(s, beta)) == pytest.approx(y, abs=1e-12)


def test_large_beta_root():
    y = solve_pole(PoleParams(0.3, 1e6))
    assert y == pytest.approx(1e-6 * (1.0 - 0.3e-12), rel=1e-13)


def test_tiny_complement_survives_rounding():
    root = solve_pole_root(PoleParams(0.4, 1e-12))
    # y rounds to 1 but 1 - y is ~ beta^{1/s}/2
    assert root.y == 1.0
    assert root.complement == pytest.approx(0.5e-30, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(0.02, 0.98), logb=st.floats(-6.0, 6.0))
def test_residual_property(s, logb):
    beta = 10.0 ** logb
    root = solve_pole_root(PoleParams(s, beta))
    assert 0.0 < root.y < 1.0 or root.complement > 0
    assert root.residual <= 1e-12


def test_root_is_decreasing_in_beta():
    y, c = solve_pole_array(0.35, np.logspace(-3, 3, 200))
    assert np.all(np.diff(y) < 0)
    assert np.allclose(y + c, 1.0, atol=1e-15)


def test_domain_errors():
    for s in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            PoleParams(s, 1.0)
    with pytest.raises(DomainError):
        PoleParams(0.3, 0.0)
    with pytest.raises(DomainError):
        solve_pole(PoleParams(0.3, 1.0), tol=0.0)


def test_unpolished_root_is_rejected():
    # bracketing alone leaves a residual far above the tolerance
    with pytest.raises(ConvergenceError):
        solve_pole_array(0.3, np.array([0.7]), newton_steps=0)


def test_zeroth_order_small_series():
    ser = small_beta_series(0.4, 0)
    assert ser.regime is Regime.SMALL_BETA
    assert float(ser.complement(1e-3)) == pytest.approx(1.5811e-8, rel=1e-4)


def test_first_small_coefficient_closed_form():
    # balancing the O(eps) terms gives a_1 = 1/4 - 1/(2s)
    for s in (0.15, 0.3, 0.45, 0.8):
        assert small_beta_coefficients(s, 1)[0] == pytest.approx(0.25 - 0.5 / s, rel=1e-14)


def test_small_coefficients_match_regression():
    # independent route: least squares of 2c/eps - 1 against (eps, eps^2)
    s = 0.45
    beta = np.logspace(-4, -2, 40)
    _, c = solve_pole_array(s, beta)
    eps = beta ** (1.0 / s)
    fit = np.linalg.lstsq(np.c_[eps, eps * eps], 2.0 * c / eps - 1.0, rcond=None)[0]
    a = small_beta_coefficients(s, 2)
    assert fit[0] == pytest.approx(a[0], rel=1e-6)
    assert fit[1] == pytest.approx(a[1], rel=1e-3)


def test_first_large_coefficient():
    for s in (0.1, 0.3, 0.7):
        assert large_beta_coefficients(s, 1)[0] == pytest.approx(-s, abs=1e-15)


def test_large_series_zeroth_order_error():
    ser = large_beta_series(0.2, 0)
    y = solve_pole(PoleParams(0.2, 100.0))
    assert abs(float(ser.evaluate(100.0)) - y) / y <= 3e-5


@pytest.mark.parametrize("s", [0.23, 0.31, 0.43])
@pytest.mark.parametrize("J", [0, 1, 2])
def test_small_series_order(s, J):
    ser = small_beta_series(s, J)
    beta = np.array([0.25, 0.125])
    _, c = solve_pole_array(s, beta)
    err = np.abs(ser.complement(beta) - c)
    assert err[0] / err[1] == pytest.approx(2.0 ** ((J + 2) / s), rel=0.1)


@pytest.mark.parametrize("s", [0.23, 0.31, 0.43])
@pytest.mark.parametrize("J", [0, 1, 2])
def test_large_series_order(s, J):
    ser = large_beta_series(s, J)
    beta = np.array([4.0, 8.0])
    y, _ = solve_pole_array(s, beta)
    err = np.abs(ser.evaluate(beta) - y)
    assert err[0] / err[1] == pytest.approx(2.0 ** (2 * J + 3), rel=0.1)


def test_windows_are_consistent():
    small = small_beta_series(0.3, 3)
    large = large_beta_series(0.3, 3)
    assert small.window[0] == 0.0 and small.window[1] > 0.0
    assert large.window[1] == math.inf and large.window[0] < math.inf
    b = small.window[1]
    _, c = solve_pole_array(0.3, np.array([b]))
    assert abs(small.complement(b) - c[0]) / c[0] <= 1e-6


def test_radius_estimate_positive():
    for regime in Regime:
        r = radius_estimate(0.3, regime)
        assert math.isfinite(r) and r > 0
