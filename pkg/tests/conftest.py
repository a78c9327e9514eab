import numpy as np
import pytest

from erfeo3.dicke import derive_dicke_params, reduce_for_ltpt
from erfeo3.magnon import magnon_basis
from erfeo3.model import default_config


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def basis(cfg):
    return magnon_basis(cfg.fe)


@pytest.fixture(scope="session")
def dicke_params(cfg):
    return derive_dicke_params(cfg)


@pytest.fixture(scope="session")
def reduced(dicke_params):
    return reduce_for_ltpt(dicke_params, 0.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20210614)
