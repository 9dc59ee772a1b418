import numpy as np
import pytest

from serialcorr.montecarlo import generate_design


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def design(rng):
    """Returns a factory for designs drawn from the simulation generator."""

    def make(n, p, f=None):
        return generate_design(n, p, p // 2 if f is None else f, rng)

    return make
