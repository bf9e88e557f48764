import functools
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qetspin.chain import solve_ground_state  # noqa: E402

H_GRID = np.linspace(0.0, 0.99, 100)


@functools.lru_cache(maxsize=None)
def ground_state(h: float):
    return solve_ground_state(h)


@pytest.fixture(scope="session")
def gs05():
    return ground_state(0.5)


@pytest.fixture(scope="session")
def h_grid():
    return H_GRID
