import math

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, max_examples=60, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

ISD = 500.0
LAM0 = 2.0 / (math.sqrt(3.0) * ISD * ISD)


@pytest.fixture
def lam0():
    return LAM0
