import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class ConstantBits:
    """Stand-in generator whose integer draws are all ones."""

    def integers(self, low, high=None, size=None):
        return np.ones(size, dtype=np.int64)


@pytest.fixture
def heads_rng():
    return ConstantBits()


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}"
    if detail:
        line += f": {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
