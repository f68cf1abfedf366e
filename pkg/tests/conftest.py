import numpy as np
import pytest

from qndsim.conventions import db_to_r

_ACCEPTANCE = []


@pytest.fixture
def r4():
    """Squeezing parameter of the -4 dB resource: e^{-2r} = 10^{-0.4}."""
    return db_to_r(-4.0)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion, then assert."""

    def check(number, description, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {description}"
        if detail:
            line += f"  ({detail})"
        _ACCEPTANCE.append((number, line))
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(line)


def eq10(r):
    """Output covariance of the parallel gate for vacuum / coherent inputs, written out by hand."""
    n = np.exp(-2 * r)
    return 0.25 * np.array(
        [
            [2, 0, 1, 0],
            [0, 1 + n, 0, -1],
            [1, 0, 1 + n, 0],
            [0, -1, 0, 2],
        ]
    )
