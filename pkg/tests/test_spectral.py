"""Transform contract, derivative multipliers, norms and field I/O."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fonls.fieldio import load_field, save_field
from fonls.spectral import (ComplexField, derivative_multiplier, field,
                            field_from_function, forward_transform, h2_norm_sq,
                            inverse_transform, l2_norm_sq, lp_norm, make_grid,
                            sobolev_seminorm_sq, spectral_derivative, sup_norm,
                            zero_field)

SQRT_PI_HALF = np.sqrt(np.pi / 2.0)


def test_make_grid_validation():
    with pytest.raises(ValueError):
        make_grid(255, 50.0)
    with pytest.raises(ValueError):
        make_grid(4, 50.0)
    with pytest.raises(ValueError):
        make_grid(256, 0.0)
    with pytest.raises(ValueError):
        make_grid(256, -1.0)


def test_grid_geometry(small_grid):
    g = small_grid
    assert g.dx == pytest.approx(g.length / g.n_points)
    assert g.nodes.size == g.n_points
    assert np.all(np.diff(g.nodes) > 0)
    assert g.nodes[0] == pytest.approx(-g.length / 2.0)
    # wavenumbers follow fftfreq ordering with spacing 2 pi / L
    assert g.wavenumbers[0] == 0.0
    assert g.wavenumbers[1] == pytest.approx(2.0 * np.pi / g.length)
    assert g.wavenumbers[g.nyquist_index] == pytest.approx(
        -np.pi * g.n_points / g.length)


def test_roundtrip_and_parseval(small_grid, rng):
    vals = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    f = field(small_grid, vals)
    coeffs = forward_transform(f)
    back = inverse_transform(coeffs, small_grid)
    assert np.max(np.abs(back.values - vals)) < 1e-13
    # unitary normalization: sum |f|^2 dx == sum |f_hat|^2
    assert float(np.sum(np.abs(coeffs) ** 2)) == pytest.approx(
        l2_norm_sq(f), rel=1e-13)


@settings(deadline=None, max_examples=30)
@given(m=st.integers(min_value=1, max_value=40),
       a=st.floats(min_value=-3.0, max_value=3.0,
                   allow_nan=False, allow_infinity=False))
def test_derivative_of_trig_mode_is_exact(m, a):
    grid = make_grid(256, 50.0)
    k = 2.0 * np.pi * m / grid.length
    f = field(grid, (1.0 + a * 1j) * np.exp(1j * k * grid.nodes))
    for order in (1, 2, 3, 4):
        df = spectral_derivative(f, order)
        exact = (1j * k) ** order * f.values
        scale = max(np.max(np.abs(exact)), 1.0)
        assert np.max(np.abs(df.values - exact)) / scale < 1e-9


def test_nyquist_zeroed_for_odd_orders(small_grid):
    for order in (1, 3):
        mult = derivative_multiplier(small_grid, order)
        assert mult[small_grid.nyquist_index] == 0.0
    for order in (2, 4):
        mult = derivative_multiplier(small_grid, order)
        assert mult[small_grid.nyquist_index] != 0.0


def test_derivative_composition(small_grid, rng):
    vals = rng.standard_normal(256)
    f = field(small_grid, np.convolve(vals, np.ones(16) / 16, mode="same"))
    d22 = spectral_derivative(spectral_derivative(f, 2), 2)
    d4 = spectral_derivative(f, 4)
    assert np.max(np.abs(d22.values - d4.values)) < 1e-10 * max(
        sup_norm(d4), 1.0)


def test_gaussian_norm_oracles():
    # closed forms for f = exp(-x^2): ||f||_2^2 = sqrt(pi/2),
    # ||f''||_2^2 = 3 sqrt(pi/2), ||f||_q = (pi/q)^(1/(2q)).
    grid = make_grid(2048, 80.0)
    f = field_from_function(grid, lambda x: np.exp(-x ** 2))
    assert l2_norm_sq(f) == pytest.approx(SQRT_PI_HALF, rel=1e-12)
    assert sobolev_seminorm_sq(f, 2) == pytest.approx(
        3.0 * SQRT_PI_HALF, rel=1e-11)
    for q in (3.0, 6.0, 14.0):
        assert lp_norm(f, q) == pytest.approx(
            (np.pi / q) ** (1.0 / (2.0 * q)), rel=1e-12)
    assert sup_norm(f) == pytest.approx(1.0, rel=1e-12)
    assert h2_norm_sq(f) == pytest.approx(
        l2_norm_sq(f) + sobolev_seminorm_sq(f, 2), rel=1e-12)


def test_lp_norm_rejects_bad_exponent(small_grid):
    f = zero_field(small_grid)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


def test_field_grid_mismatch(small_grid):
    with pytest.raises(ValueError):
        field(small_grid, np.zeros(128))


def test_fieldio_roundtrip(tmp_path, small_grid, rng):
    vals = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    f = field(small_grid, vals)
    path = tmp_path / "field.bin"
    save_field(path, f)
    g = load_field(path, small_grid)
    assert np.array_equal(g.values, f.values)
    assert g.grid.n_points == small_grid.n_points


def test_fieldio_grid_mismatch(tmp_path, small_grid):
    path = tmp_path / "field.bin"
    save_field(path, zero_field(small_grid))
    with pytest.raises(ValueError):
        load_field(path, make_grid(128, 50.0))
    with pytest.raises(ValueError):
        load_field(path, make_grid(256, 40.0))


def test_is_finite_flag(small_grid):
    vals = np.zeros(256, dtype=complex)
    assert ComplexField(small_grid, vals).is_finite()
    vals[3] = np.nan
    assert not field(small_grid, vals).is_finite()
