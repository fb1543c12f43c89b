import numpy as np
import pytest

from trisect.volterra import SampledPotential


@pytest.fixture(scope="session")
def small_q():
    """0.1 exp(-4x) on [0, 4], compactly supported."""
    return SampledPotential.from_function(lambda x: 0.1 * np.exp(-4 * x), 4.0, 400, a=4.0, compact=True)


@pytest.fixture(scope="session")
def zero_q():
    return SampledPotential.zero(4.0, 400)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
