import numpy as np
import pytest

from ifsdyn.metric import ContractionAlphabet, SpaceBox
from ifsdyn.sequence import finite_ifs
from ifsdyn.verify import sierpinski_alphabet

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit1():
    return SpaceBox.unit(1)


@pytest.fixture
def unit2():
    return SpaceBox.unit(2)


@pytest.fixture
def line_alphabet(unit1):
    """Maps on [0, 1] used across the 1D examples."""
    return ContractionAlphabet.build(unit1, {
        "f1": ([[0.5]], [0.0]),
        "f2": ([[0.5]], [0.5]),
        "f3": ([[0.25]], [0.25]),
        "f": ([[0.5]], [0.25]),
        "g": ([[1 / 3]], [0.0]),
    })


@pytest.fixture
def sierpinski():
    return finite_ifs(sierpinski_alphabet(), ("f1", "f2", "f3"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
