import numpy as np
import pytest

P_A = np.array([0.4, 0.2, 0.2, 0.2])
P_B = np.array([0.25, 0.35, 0.35, 0.05])

_acceptance_lines = []


@pytest.fixture
def p_a():
    return P_A.copy()


@pytest.fixture
def p_b():
    return P_B.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


@pytest.fixture
def record_criterion():
    """Register a one-line acceptance verdict for the terminal summary."""
    def record(label, passed, detail):
        _acceptance_lines.append('%s %s: %s' % ('PASS' if passed else 'FAIL', label, detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section('acceptance criteria')
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
