import numpy as np
import pytest

from twomode.fock import FockSpace

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def space2():
    return FockSpace(2)


@pytest.fixture(scope="session")
def space4():
    return FockSpace(4)


@pytest.fixture(scope="session")
def space6():
    return FockSpace(6)


def _ket_bra(space, left, right):
    m = np.zeros((space.dim, space.dim), dtype=complex)
    m[space.index(*left), space.index(*right)] = 1.0
    return m


@pytest.fixture(scope="session")
def ket_bra():
    """``ket_bra(space, (na, nb), (ma, mb))`` builds ``|na,nb><ma,mb|``."""
    return _ket_bra
