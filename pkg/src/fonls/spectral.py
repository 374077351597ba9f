"""Periodic spectral grid, unitary DFT pair, derivatives and norm quadratures.

The domain is the torus [-L/2, L/2) used as a stand-in for the real line;
runs are meaningful only while the field carries negligible mass near the
boundary (monitored by the diagnostics module).

Transform convention: the coefficient array is ``fft(values) * sqrt(dx / n)``
in numpy's native (fftfreq) mode ordering, which makes the pair unitary with
respect to the rectangle-rule L^2 inner product: sum |f_j|^2 dx == sum |fhat|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-length/2, length/2)."""

    n_points: int
    length: float
    dx: float
    nodes: np.ndarray
    wavenumbers: np.ndarray  # 2*pi*m/length, fftfreq ordering

    @property
    def nyquist_index(self) -> int:
        return self.n_points // 2


def make_grid(n_points: int, length: float) -> Grid:
    """Build a periodic grid. n_points must be even and at least 8."""
    if n_points < 8:
        raise ValueError(f"n_points must be >= 8, got {n_points}")
    if n_points % 2 != 0:
        raise ValueError(f"n_points must be even, got {n_points}")
    if not length > 0:
        raise ValueError(f"length must be positive, got {length}")
    dx = length / n_points
    nodes = -length / 2 + dx * np.arange(n_points)
    wavenumbers = 2 * np.pi * np.fft.fftfreq(n_points, d=dx)
    nodes.setflags(write=False)
    wavenumbers.setflags(write=False)
    return Grid(n_points=n_points, length=float(length), dx=dx,
                nodes=nodes, wavenumbers=wavenumbers)


@dataclass(frozen=True)
class ComplexField:
    """Complex samples of a function on a Grid. Treated as immutable."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"n_points {self.grid.n_points}")

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))


def field(grid: Grid, values) -> ComplexField:
    vals = np.asarray(values, dtype=np.complex128).copy()
    vals.setflags(write=False)
    return ComplexField(grid, vals)


def field_from_function(grid: Grid, fn) -> ComplexField:
    return field(grid, fn(grid.nodes))


def zero_field(grid: Grid) -> ComplexField:
    return field(grid, np.zeros(grid.n_points))


def _scale(grid: Grid) -> float:
    return math.sqrt(grid.dx / grid.n_points)


def forward_transform(f: ComplexField) -> np.ndarray:
    """Unitary DFT coefficients in fftfreq mode ordering."""
    return np.fft.fft(f.values) * _scale(f.grid)


def inverse_transform(coeffs: np.ndarray, grid: Grid) -> ComplexField:
    if coeffs.shape != (grid.n_points,):
        raise ValueError(
            f"coefficient array of length {coeffs.shape} does not match "
            f"grid with {grid.n_points} points")
    return field(grid, np.fft.ifft(coeffs / _scale(grid)))


def derivative_multiplier(grid: Grid, order: int) -> np.ndarray:
    """(i*xi)^order with the unpaired Nyquist mode zeroed for odd orders."""
    if order < 0:
        raise ValueError(f"derivative order must be nonnegative, got {order}")
    mult = (1j * grid.wavenumbers) ** order
    if order % 2 == 1:
        mult = mult.copy()
        mult[grid.nyquist_index] = 0.0
    return mult


def spectral_derivative(f: ComplexField, order: int) -> ComplexField:
    if order == 0:
        return f
    coeffs = forward_transform(f) * derivative_multiplier(f.grid, order)
    return inverse_transform(coeffs, f.grid)


def l2_norm_sq(f: ComplexField) -> float:
    return float(np.sum(np.abs(f.values) ** 2) * f.grid.dx)


def lp_norm(f: ComplexField, q: float) -> float:
    if q < 1:
        raise ValueError(f"L^q norm requires q >= 1, got {q}")
    return float((np.sum(np.abs(f.values) ** q) * f.grid.dx) ** (1.0 / q))


def sobolev_seminorm_sq(f: ComplexField, s: float) -> float:
    """sum over modes of |xi|^(2s) |fhat(xi)|^2 (homogeneous H^s, squared)."""
    if s < 0:
        raise ValueError(f"Sobolev order must be nonnegative, got {s}")
    coeffs = forward_transform(f)
    weights = np.abs(f.grid.wavenumbers) ** (2 * s)
    return float(np.sum(weights * np.abs(coeffs) ** 2))


def sup_norm(f: ComplexField) -> float:
    return float(np.max(np.abs(f.values)))


def h2_norm_sq(f: ComplexField) -> float:
    """Full (inhomogeneous) H^2 norm squared: L^2 plus second-derivative part."""
    return l2_norm_sq(f) + sobolev_seminorm_sq(f, 2)
