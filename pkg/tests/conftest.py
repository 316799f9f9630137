import numpy as np
import pytest

from mps2cl.core.mps import aklt_tensors, canonical_form, classical_tensors, random_tensors
from mps2cl.errors import ERROR_HANDLER


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: dense 4096-dimensional runs and full sweeps')


@pytest.fixture(scope='session')
def aklt():
    return aklt_tensors()


@pytest.fixture(scope='session')
def aklt_canonical(aklt):
    return canonical_form(aklt)


@pytest.fixture(scope='session')
def random_model():
    return random_tensors(2, 2, seed=7)


@pytest.fixture(scope='session')
def random_canonical(random_model):
    return canonical_form(random_model)


@pytest.fixture(scope='session')
def classical_canonical():
    return canonical_form(classical_tensors([0.6, 0.4]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def error_handler():
    ERROR_HANDLER.reset()
    ERROR_HANDLER.set_stop()
    yield ERROR_HANDLER
    ERROR_HANDLER.reset()
    ERROR_HANDLER.set_stop()
