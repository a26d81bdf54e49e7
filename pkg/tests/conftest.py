import numpy as np
import pytest

from claw_control import BoxDomain, Flux, build_grid


@pytest.fixture
def burgers():
    return Flux.burgers()


@pytest.fixture
def line400():
    return build_grid(BoxDomain.unit(1), 400)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
