"""Shared fixtures.

The p = 13 ground state on the production grid (L = 100, N = 2048) is
expensive enough to solve once per session; everything that needs a certified
profile shares it.
"""

import numpy as np
import pytest

from fonls.functionals import NonlinearityParams
from fonls.groundstate import petviashvili_solve
from fonls.spectral import make_grid


@pytest.fixture(scope="session")
def grid13():
    return make_grid(2048, 100.0)


@pytest.fixture(scope="session")
def params13():
    return NonlinearityParams(p=13.0)


@pytest.fixture(scope="session")
def q13(params13, grid13):
    result = petviashvili_solve(params13, grid13)
    assert result.converged, "session ground state failed to converge"
    return result


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(256, 50.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)
