import numpy as np
import pytest

from povm_shadows import operators as ops
from povm_shadows.povm import platonic


@pytest.fixture
def rng():
    return ops.make_rng(20221104)


@pytest.fixture(scope="session")
def octahedron():
    return platonic("octahedron")


@pytest.fixture(scope="session")
def tetrahedron():
    return platonic("tetrahedron")


P_ZPLUS = np.array([[1, 0], [0, 0]], dtype=complex)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
