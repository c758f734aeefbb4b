import pytest

from parisian_qsd import models as M


@pytest.fixture(scope="session")
def bm_sn():
    return M.brownian(1.0, 1.0, M.SPECTRALLY_NEGATIVE)


@pytest.fixture(scope="session")
def bm_sp():
    return M.brownian(1.0, 1.0, M.SPECTRALLY_POSITIVE)


@pytest.fixture(scope="session")
def mm1():
    return M.mm1_queue(1.0, 4.0)


@pytest.fixture(scope="session")
def cl():
    return M.cramer_lundberg(1.0, 3.0, 2.0)


@pytest.fixture(scope="session")
def mm1_heavy():
    return M.mm1_queue(1.0, 1.21)


@pytest.fixture(scope="session")
def all_models(bm_sn, bm_sp, mm1, cl):
    return [bm_sn, bm_sp, mm1, cl]
