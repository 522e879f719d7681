import math

import numpy as np
import pytest

from voigtlab.spectral_domain import build_torus_basis


@pytest.fixture(scope="session")
def torus1():
    return build_torus_basis(2.0 * math.pi, 1)


@pytest.fixture(scope="session")
def torus2():
    return build_torus_basis(2.0 * math.pi, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s[2:4])):
            terminalreporter.write_line(line)
