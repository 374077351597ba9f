"""Pseudospectral simulator and variational toolkit for the 1D focusing
fourth-order nonlinear Schrodinger equation."""

from .spectral import (ComplexField, Grid, field, field_from_function,
                       make_grid)
from .functionals import NonlinearityParams

__all__ = [
    "ComplexField", "Grid", "field", "field_from_function", "make_grid",
    "NonlinearityParams",
]
