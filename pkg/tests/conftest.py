import numpy as np
import pytest

from qwmix import graphs, spectral


def decompose(n, p, seed=0):
    sample = graphs.sample_gnp(n, p, seed)
    return spectral.eigendecompose(graphs.normalize(sample).matrix)


@pytest.fixture
def k2():
    return decompose(2, 1.0)


@pytest.fixture
def k3():
    return decompose(3, 1.0)


@pytest.fixture(scope="session")
def gnp64():
    return decompose(64, 0.5, 9)


def pytest_configure(config):
    np.set_printoptions(precision=6, suppress=True)


# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[num]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {num:>2}: {title} | {detail}")
