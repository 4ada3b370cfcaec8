import math

import pytest
from hypothesis import HealthCheck, settings

from bjjmix import ModelParams, State

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def sym06():
    return ModelParams.symmetric(0.6)


@pytest.fixture
def sym2():
    return ModelParams.symmetric(2.0)


PI_IC = State(0.1, 0.1, math.pi, math.pi)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
