import numpy as np
import pytest

from spiselect import generate_benchmark_trace
from spiselect.dynamics import LORENZ96_K22


@pytest.fixture(scope="session")
def l96_trace():
    return generate_benchmark_trace("lorenz96", system_params=LORENZ96_K22)


@pytest.fixture(scope="session")
def l63_trace():
    return generate_benchmark_trace("lorenz63")


@pytest.fixture(scope="session")
def henon_trace():
    return generate_benchmark_trace("henon")


@pytest.fixture(scope="session")
def logistic_trace():
    return generate_benchmark_trace("logistic")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion, filled in by test_acceptance.py
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
