import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from matterwave.model import make_constants, make_electron, make_photon

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NATURAL = make_constants()


def _direction(v):
    v = np.asarray(v, dtype=float)
    return tuple(v / np.linalg.norm(v))


directions = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(
    lambda v: math.sqrt(sum(x * x for x in v)) > 0.2
).map(_direction)

electrons = st.builds(
    lambda rho0, speed, d: make_electron(NATURAL, rho0, tuple(speed * x for x in d)),
    st.floats(0.1, 5.0), st.floats(0.05, 0.95), directions,
)
photons = st.builds(
    lambda rho0, omega, d: make_photon(NATURAL, rho0, d, omega),
    st.floats(0.1, 5.0), st.floats(0.2, 5.0), directions,
)
particles = st.one_of(electrons, photons)


@pytest.fixture
def natural():
    return NATURAL


@pytest.fixture
def electron():
    return make_electron(NATURAL, 1.0, (0.5, 0.2, 0.1))


@pytest.fixture
def photon():
    return make_photon(NATURAL, 1.0, (1.0, 1.0, 0.0), 2.0)
