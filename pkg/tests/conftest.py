import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from coupled_hartree.grid import GridSpec, RadialGrid

settings.register_profile(
    "default", deadline=None, max_examples=25, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def box():
    return GridSpec(16, 4.0)


@pytest.fixture(scope="session")
def ray():
    return RadialGrid(1000, 30.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
