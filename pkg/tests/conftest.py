import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ballpoly.generators import regular_tetrahedron, rugby_ball, suspended_polygon
from ballpoly.hull import Configuration

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def tetra():
    return Configuration(regular_tetrahedron())


@pytest.fixture(scope="session")
def pentagon():
    return suspended_polygon(3)


@pytest.fixture(scope="session")
def rugby3():
    return rugby_ball(3, 0.5)


def random_unit(rng, n=None):
    u = rng.normal(size=(3,) if n is None else (n, 3))
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
