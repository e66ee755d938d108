import numpy as np
import pytest

from optomech import states


@pytest.fixture(scope="session")
def grid():
    return states.default_grid()


@pytest.fixture(scope="session")
def ground(grid):
    return states.make_ground(grid)


@pytest.fixture(scope="session")
def thermal2(grid):
    return states.make_thermal(grid, 2.0)


@pytest.fixture(scope="session")
def squeezed(grid):
    return states.make_squeezed(grid, 0.5)


@pytest.fixture()
def rng():
    return np.random.default_rng(71)
