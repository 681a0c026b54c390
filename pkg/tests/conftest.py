"""pytest configuration for all tests."""
import hypothesis
import pytest

import carverify.space as space
from carverify.space import Isometry

hypothesis.settings.register_profile("carverify", max_examples=25, deadline=None)
hypothesis.settings.load_profile("carverify")


@pytest.fixture(params=[1, 2, 3, 4])
def random_v(request: pytest.FixtureRequest) -> Isometry:
    """Random isometry with index -1 on ``K_1`` through ``K_4``."""
    return space.random_index_minus_one(request.param, seed=1000 + request.param)


@pytest.fixture(params=[1, 2, 3])
def shift(request: pytest.FixtureRequest) -> Isometry:
    return space.shift_isometry(request.param)
