import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from phiconv import phi_space as ps
from phiconv.ground import build_ground_set

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def line3():
    return build_ground_set(points=[[0.0], [1.0], [2.0]])


@pytest.fixture
def line_affine(line3):
    return ps.affine(line3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
