import numpy as np
import pytest

from stickslip import PhysicalParams, certify_attractor, certify_gas, maximize_basin


@pytest.fixture(scope="session")
def params():
    return PhysicalParams()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


# expensive certificates shared across test modules
@pytest.fixture(scope="session")
def attractor_v1(params):
    return certify_attractor(params, 1.0)


@pytest.fixture(scope="session")
def basin_v145(params):
    return maximize_basin(params, 1.45)


@pytest.fixture(scope="session")
def gas_v10(params):
    return certify_gas(params, 10.0)
