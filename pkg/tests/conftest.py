import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qgraph.sampling import random_algebra

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=100, deadline=None)
settings.load_profile("default")

BLOCK_SHAPES = [(1,), (2,), (3,), (1, 2), (2, 2), (1, 1, 2)]

ACCEPTANCE_LINES = []


def fro(x):
    return float(np.linalg.norm(np.asarray(x).ravel()))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=BLOCK_SHAPES, ids=lambda b: "blocks" + "-".join(map(str, b)))
def alg(request):
    return random_algebra(request.param, seed=sum(request.param) * 7 + len(request.param))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
