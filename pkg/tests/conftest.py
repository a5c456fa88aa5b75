import numpy as np
import pytest

from dqc1pf.mrf import MrfModel, five_node_example, random_model


@pytest.fixture
def five_node():
    return five_node_example()


@pytest.fixture
def single_node():
    """n = 1 with theta_00 = 1: spectrum {0, -1}."""
    return MrfModel(1, {(0, 0): 1.0})


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_models(count, sizes, seed=0, density=1.0):
    return [random_model(sizes[i % len(sizes)], seed * 100003 + i, density) for i in range(count)]


# one verdict line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[num])
