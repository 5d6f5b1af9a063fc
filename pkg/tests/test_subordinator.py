import math

import numpy as np
import pytest
from scipy.integrate import quad

from fracdrift.errors import DomainError
from fracdrift.subordinator import (
    SubordinatorParams,
    crossover,
    laplace_check,
    laplace_value,
    mass,
    phi,
    phi_contour,
    phi_half_closed,
    phi_series,
    phi_series_detail,
)


def branch_cut_oracle(s, x):
    """Hankel contour collapsed onto the negative axis, done by scipy."""
    c, d = math.cos(math.pi * s), math.sin(math.pi * s)
    f = lambda u: math.exp(-u * x - u ** s * c) * math.sin(u ** s * d)
    return quad(f, 0.0, math.inf, limit=400, epsabs=1e-14, epsrel=1e-12)[0] / math.pi


def test_half_closed_form():
    assert phi(0.5, 1.0) == pytest.approx(0.2196956, abs=1e-7)
    xs = np.logspace(-2, 2, 30)
    assert np.allclose(phi(0.5, xs), phi_half_closed(xs), rtol=1e-9, atol=1e-14)


def test_series_and_contour_agree():
    p = SubordinatorParams(0.3)
    assert phi_series(p, 1.0) == pytest.approx(phi_contour(p, 1.0), abs=1e-8)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("s", [0.3, 0.6, 0.8])
@pytest.mark.parametrize("x", [0.3, 1.0, 4.0])
def test_against_branch_cut_integral(s, x):
    assert phi(s, x) == pytest.approx(branch_cut_oracle(s, x), rel=1e-7, abs=1e-12)


def test_nonpositive_x_is_zero():
    assert phi(0.4, 0.0) == 0.0
    assert np.all(phi(0.4, np.array([-1.0, -1e-3])) == 0.0)


def test_series_tail_bound():
    d = phi_series_detail(SubordinatorParams(0.4, truncation=30), 2.0)
    full = phi_series(SubordinatorParams(0.4, truncation=300), 2.0)
    assert abs(d.value - full) <= d.remainder_bound + 1e-15


def test_crossover_switches_route():
    s = 0.7
    xc = crossover(s)
    p = SubordinatorParams(s)
    for x in (xc * 1.01, xc * 3):
        assert phi(s, x) == pytest.approx(phi_contour(p, x), rel=1e-8)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_laplace_identity(s, lam):
    assert laplace_check(SubordinatorParams(s), lam) <= 1e-6


def test_laplace_value_domain():
    with pytest.raises(DomainError):
        laplace_value(0.5, 0.0)


@pytest.mark.parametrize("s", [0.5, 0.7])
def test_unit_mass(s):
    assert mass(s) == pytest.approx(1.0, abs=1e-6)


def test_params_validation():
    with pytest.raises(DomainError):
        SubordinatorParams(1.0)
    with pytest.raises(DomainError):
        SubordinatorParams(0.5, truncation=0)


def test_series_stabilizes_within_forty_terms():
    a = phi_series(SubordinatorParams(0.3, truncation=40), 2.0)
    b = phi_series(SubordinatorParams(0.3, truncation=400), 2.0)
    assert abs(a - b) <= 1e-10 * abs(b)


def test_vanishes_rapidly_near_zero():
    vals = phi(0.4, np.array([0.01, 0.003, 0.001]))
    assert np.all(vals >= 0) and vals[-1] < 1e-10
    assert np.all(np.diff(vals) < 0)
