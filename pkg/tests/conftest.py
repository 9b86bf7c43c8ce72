import numpy as np
import pytest

from detfield.realization import ScatteringData, realize_from_bound_states
from detfield.verify import random_system


@pytest.fixture
def rng():
    return np.random.default_rng(1729)


@pytest.fixture
def one_state():
    """kappa = 1, c = 1: phi(x) = exp(-x), all Gramians exp(-2x)/2."""
    return realize_from_bound_states(ScatteringData(bound_states=((1.0, 1.0),)))


@pytest.fixture
def two_state():
    """kappa = (1, 2), c = (1, 1): phi(x) = exp(-x) + exp(-2x)."""
    return realize_from_bound_states(ScatteringData(bound_states=((1.0, 1.0), (2.0, 1.0))))


@pytest.fixture
def soliton():
    """kappa = 1, c = sqrt(2): recovers q(x) = -2 sech^2(x)."""
    return realize_from_bound_states(ScatteringData(bound_states=((1.0, np.sqrt(2.0)),)))


@pytest.fixture
def random_selfadjoint(rng):
    return random_system(rng, 3, "selfadjoint")


@pytest.fixture
def random_real(rng):
    return random_system(rng, 4, "real")


@pytest.fixture
def random_complex(rng):
    return random_system(rng, 3, "complex")
