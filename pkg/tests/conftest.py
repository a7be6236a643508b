import numpy as np
import pytest

from luderskit.ensembles import SIGMA_X, SIGMA_Y, SIGMA_Z

ACCEPTANCE_LINES = []


@pytest.fixture
def sx():
    return SIGMA_X.copy()


@pytest.fixture
def sy():
    return SIGMA_Y.copy()


@pytest.fixture
def sz():
    return SIGMA_Z.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
