"""Binary field serialization.

Format (little-endian): uint32 n_points, float64 length, then n_points
interleaved (re, im) float64 pairs.
"""

from __future__ import annotations

import struct

import numpy as np

from .spectral import ComplexField, Grid, field, make_grid

_HEADER = struct.Struct("<Id")


def save_field(path, f: ComplexField) -> None:
    interleaved = np.empty(2 * f.grid.n_points, dtype="<f8")
    interleaved[0::2] = f.values.real
    interleaved[1::2] = f.values.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(f.grid.n_points, f.grid.length))
        fh.write(interleaved.tobytes())


def load_field(path, grid: Grid | None = None) -> ComplexField:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"truncated field file: {path}")
        n_points, length = _HEADER.unpack(header)
        payload = np.frombuffer(fh.read(), dtype="<f8")
    if payload.size != 2 * n_points:
        raise ValueError(
            f"field file {path} holds {payload.size // 2} samples, "
            f"header says {n_points}")
    if grid is None:
        grid = make_grid(n_points, length)
    elif grid.n_points != n_points or grid.length != length:
        raise ValueError("field file header does not match the supplied grid")
    return field(grid, payload[0::2] + 1j * payload[1::2])
