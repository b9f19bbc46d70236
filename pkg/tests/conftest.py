import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def record_criterion(name, passed, detail=""):
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())
    print(ACCEPTANCE_LINES[-1])
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
