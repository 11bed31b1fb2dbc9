import numpy as np
import pytest

from delayqp.fixtures import fixture_path, load_example
from helpers import make_random_problem


@pytest.fixture
def ex1():
    return load_example("example1")


@pytest.fixture
def ex1_prose():
    return load_example("example1_prose_B")


@pytest.fixture
def ex2():
    return load_example("example2")


@pytest.fixture
def ex1_path():
    return fixture_path("example1")


@pytest.fixture
def ex2_path():
    return fixture_path("example2")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_problems():
    rng = np.random.default_rng(7)
    return [make_random_problem(rng) for _ in range(20)]


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record an acceptance line, then assert it."""

    def record(number, title, passed, detail=""):
        _CRITERIA[number] = (title, bool(passed), detail)
        assert passed, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        terminalreporter.write_line(
            f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail}")
