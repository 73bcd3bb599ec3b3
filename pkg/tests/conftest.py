import numpy as np
import pytest

from raymimo.angular import RNGStream


@pytest.fixture
def stream():
    return RNGStream(12345, 0)


@pytest.fixture
def gen():
    return np.random.default_rng(2024)


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary, then assert."""

    def record(number, title, passed, detail):
        ACCEPTANCE[number] = (title, bool(passed), detail)
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {title}: {detail}"
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(
            f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {title}: {detail}")
