import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("icap", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("icap")


def cgauss(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
