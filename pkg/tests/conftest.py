import numpy as np
import pytest

from ellbethe.theta import ModularParams


@pytest.fixture
def p():
    return ModularParams(0.9j, 0.11)


@pytest.fixture
def p10():
    return ModularParams(0.9j, 0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
