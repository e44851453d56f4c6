import numpy as np
import pytest

from cnlslab.grid import make_grid
from cnlslab.profiles import ground_state_1d

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def grid1d():
    return make_grid(1, 1024, 80.0)


@pytest.fixture(scope="session")
def sech_profile(grid1d):
    return ground_state_1d(grid1d)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
