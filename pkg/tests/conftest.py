import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from viscowri.fields import Grid2D  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_grid():
    return Grid2D(12, 15, 10.0)


def random_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)
