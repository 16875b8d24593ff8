import numpy as np
import pytest

from finslerkit.norms import counterexample_metric, euclidean, make_quartic_family

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def quartic():
    return counterexample_metric()


@pytest.fixture(scope="session")
def euclid():
    return euclidean(2)


@pytest.fixture(scope="session")
def flat_quartic():
    """Quartic family at c = 2, which is the Euclidean norm written as a 4th root."""
    return make_quartic_family(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
