import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance results collected by tests/test_acceptance.py, printed at the end
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
small_t = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
angles = st.floats(0, 2 * math.pi, allow_nan=False, allow_infinity=False)
signs = st.sampled_from([1, -1])


@st.composite
def points(draw, t=small_t):
    return np.array([draw(finite), draw(finite), draw(finite), draw(t)])


@st.composite
def unit4(draw):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(4)])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([0.0, 0.0, 0.0, 1.0]), 1.0
    return v / n


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
