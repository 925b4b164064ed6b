import random

import pytest
from hypothesis import HealthCheck, settings

from symcartan.ring import Chart

settings.register_profile("default", deadline=None, max_examples=20,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def plane():
    return Chart.affine("x", "y")


@pytest.fixture
def line():
    return Chart.affine("x")


@pytest.fixture
def rng():
    return random.Random(1234)
