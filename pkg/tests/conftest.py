import numpy as np
import pytest

from hyperbell import circuits


@pytest.fixture(scope="session")
def kw():
    return circuits.kw_reference_config()


@pytest.fixture(scope="session")
def modified():
    return circuits.modified_reference_config()


@pytest.fixture(scope="session")
def kw_partition(kw):
    return circuits.partition_states(kw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
