import random

import pytest

from ace import arith, dh, paillier
from ace.dh import DhBackend
from ace.multi import AceScheme, bell_lapadula

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def tiny_group():
    return arith.GroupParams(23, 11, 2)


@pytest.fixture(scope="session")
def group128():
    return arith.generate_group(128, random.Random(128))


@pytest.fixture(scope="session")
def dh_instance(group128):
    return dh.setup(group128, random.Random(7))


@pytest.fixture(scope="session")
def paillier_instance():
    return paillier.setup(128, random.Random(9))


@pytest.fixture(scope="session")
def toy_paillier():
    return paillier.setup(4, random.Random(1), primes=(3, 5))


@pytest.fixture(scope="session")
def bl3_dh(group128):
    scheme = AceScheme(DhBackend(group128))
    pp, msk = scheme.setup(bell_lapadula(3), random.Random(3))
    return scheme, pp, msk
