import numpy as np
import pytest

from fracspec.grids import jgl_grid
from fracspec.jacobi import JacobiParams

STANDARD_PAIRS = [(0.0, 0.0), (-0.5, -0.5), (-0.5, 0.5)]
FRACTIONAL_ALPHAS = [0.3, 0.5, 1.5, 1.9]


@pytest.fixture(params=STANDARD_PAIRS, ids=lambda ab: f"ab={ab[0]},{ab[1]}")
def pair(request):
    return JacobiParams(*request.param)


@pytest.fixture
def grid16(pair):
    return jgl_grid(pair, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
