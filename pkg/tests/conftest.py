import math

import pytest

from qplab.signal import QuasiperiodicSignal, preset


@pytest.fixture(scope="session")
def golden():
    return preset("golden")


@pytest.fixture(scope="session")
def sqrt23():
    return preset("sqrt23")


@pytest.fixture(scope="session")
def single_term():
    return QuasiperiodicSignal([(1, 2 * math.pi)], label="single")
