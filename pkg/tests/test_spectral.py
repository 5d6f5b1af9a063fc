import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracdrift.errors import CompatibilityError, DomainError
from fracdrift.spectral import (
    SpectralGrid,
    SymbolSplit,
    apply_operator,
    apply_split,
    cutoff_phi,
    random_field,
    regularity_experiment,
    rough_forcing,
    smooth_step,
    solve_constant,
    sobolev_norm,
)


def plane_wave(n, N, axis=-1):
    x = np.arange(N) * 2 * math.pi / N
    grids = np.meshgrid(*([x] * n), indexing="ij")
    return SpectralGrid.from_values(np.exp(1j * grids[axis]))


def test_single_mode_operator():
    b = 0.7
    u = plane_wave(2, 16)
    out = apply_operator(u, SymbolSplit(0.3, b))
    assert np.allclose(out.values(), (1 + 1j * b) * u.values(), atol=1e-13)
    sol = solve_constant(u, SymbolSplit(0.3, b))
    assert np.allclose(sol.values(), u.values() / (1 + 1j * b), atol=1e-13)


def test_constant_is_annihilated():
    u = SpectralGrid.from_values(np.full((8, 8), 3.0))
    assert np.max(np.abs(apply_operator(u, SymbolSplit(0.4)).coeffs)) == 0.0


def test_parseval_energy():
    s, b = 0.35, 1.3
    u = random_field(2, 32, 1)
    v = apply_operator(u, SymbolSplit(s, b))
    xi = u.xi()
    direct = np.mean(np.abs(v.values()) ** 2)
    mult = np.sum((u.abs_xi() ** (4 * s) + b * b * xi[-1] ** 2) * np.abs(u.coeffs) ** 2)
    assert direct == pytest.approx(mult, rel=1e-12)


def test_real_fields_are_conjugate_symmetric():
    assert random_field(3, 16, 4).conjugate_defect() < 1e-15
    f = rough_forcing(2, 32, 0.5, 0.25, 2)
    assert f.conjugate_defect() < 1e-15
    assert np.max(np.abs(f.values().imag)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(xi=st.floats(0.0, 5.0), xin=st.floats(-5.0, 5.0), s=st.floats(0.05, 0.95), b=st.floats(0.1, 3.0))
def test_split_identity_and_support(xi, xin, s, b):
    full, a_t, e = SymbolSplit(s, b).parts(np.array([xi]), np.array([xin]))
    assert a_t[0] + e[0] == full[0]
    direct = xi ** (2 * s) + 1j * b * xin
    assert abs(full[0] - direct) <= 1e-15 * max(1.0, abs(direct))
    if xi > 1.0:
        assert e[0] == 0.0
    if xi >= 1.0:
        assert a_t[0].real > 0


def test_split_on_grid_is_exact():
    u = random_field(2, 32, 0)
    sym = SymbolSplit(0.3, 2.0)
    ta, eu = apply_split(u, sym)
    assert np.array_equal(ta.coeffs + eu.coeffs, apply_operator(u, sym).coeffs)


def test_cutoff_shape():
    t = np.linspace(-1, 2, 301)
    v = smooth_step(t)
    assert np.all(v[t <= 0] == 0) and np.all(v[t >= 1] == 1)
    assert np.all(np.diff(v) >= 0)
    assert cutoff_phi(0.5) == 0.0 and cutoff_phi(2.5) == 1.0


@pytest.mark.parametrize("n, N", [(1, 64), (2, 32), (3, 16)])
@pytest.mark.parametrize("s, b", [(0.2, 1.0), (0.45, 0.3), (0.8, 4.0)])
def test_roundtrip(n, N, s, b):
    u = random_field(n, N, 11)
    sym = SymbolSplit(s, b)
    back = solve_constant(apply_operator(u, sym), sym)
    assert np.max(np.abs(back.coeffs - u.coeffs)) <= 1e-12
    again = apply_operator(solve_constant(u, sym), sym)
    assert np.max(np.abs(again.coeffs - u.coeffs)) <= 1e-12


def test_multiplier_bounds():
    s, b = 0.3, 0.8
    f = random_field(2, 32, 5)
    u = solve_constant(f, SymbolSplit(s, b))
    k = f.abs_xi()
    nz = k > 0
    assert np.all(np.abs(u.coeffs[nz]) <= np.abs(f.coeffs[nz]) / k[nz] ** (2 * s) * (1 + 1e-12))
    assert np.all(b * np.abs(f.xi()[-1][nz] * u.coeffs[nz]) <= np.abs(f.coeffs[nz]) * (1 + 1e-12))


def test_compatibility_error():
    f = SpectralGrid.from_values(np.ones((8, 8)))
    with pytest.raises(CompatibilityError):
        solve_constant(f, SymbolSplit(0.3))


def test_sobolev_norm_examples():
    u = random_field(2, 32, 3)
    assert sobolev_norm(u, 0) == pytest.approx(math.sqrt(np.mean(np.abs(u.values()) ** 2)), rel=1e-12)
    w = plane_wave(2, 8)
    assert sobolev_norm(w, 1) == pytest.approx(math.sqrt(2) * abs(w.coeffs[0, 1]), rel=1e-14)
    norms = [sobolev_norm(u, m) for m in (0, 0.5, 1, 2)]
    assert all(a < b for a, b in zip(norms, norms[1:]))


def test_low_frequency_part_is_smoothing():
    u = random_field(2, 64, 9)
    _, eu = apply_split(u, SymbolSplit(0.3))
    assert np.all(eu.coeffs[u.abs_xi() > 1] == 0)
    norms = [sobolev_norm(eu, m) for m in (0, 10, 40)]
    assert norms[-1] <= 2.0 ** 20 * norms[0]


@pytest.mark.parametrize("s", [0.2, 0.3, 0.45])
def test_gain_anisotropy_two_dimensions(s):
    rep = regularity_experiment(SymbolSplit(s, 1.0), l=0.5)
    assert rep.gain_orthogonal == pytest.approx(2 * s, abs=0.1)
    assert rep.gain_axis == pytest.approx(1.0, abs=0.1)
    assert rep.ratio_variation < 0.05
    r = np.asarray(rep.drift_ratios)
    assert (r.max() - r.min()) / r.min() < 0.05


def test_gain_three_dimensions():
    rep = regularity_experiment(SymbolSplit(0.3, 1.0), l=0.0, resolutions=(32, 64), n=3)
    assert rep.ratio_variation < 0.10
    assert rep.gain_orthogonal == pytest.approx(0.6, abs=0.1)
    assert rep.gain_axis == pytest.approx(1.0, abs=0.1)


def test_drift_derivative_control():
    sym = SymbolSplit(0.3, 1.5)
    f = rough_forcing(2, 64, 0.5, 0.25, 0)
    u = solve_constant(f, sym)
    du = SpectralGrid(2, 64, 1j * sym.b * u.xi()[-1] * u.coeffs)
    frac = SpectralGrid(2, 64, u.abs_xi() ** 0.6 * u.coeffs)
    assert sobolev_norm(du, 0.5) <= sobolev_norm(f, 0.5) + sobolev_norm(frac, 0.5) + 1e-12


def test_report_serializes():
    d = regularity_experiment(SymbolSplit(0.3), l=0.5).to_dict()
    assert {"ratios", "gain_axis", "ratio_variation"} <= set(d)


def test_grid_validation():
    with pytest.raises(DomainError):
        SpectralGrid(2, 12, np.zeros((12, 12), complex))
    with pytest.raises(DomainError):
        SpectralGrid(2, 8, np.zeros((8, 4), complex))
    with pytest.raises(DomainError):
        SymbolSplit(1.0)
