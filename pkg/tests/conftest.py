import numpy as np
import pytest

from altchain.model import ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_density_matrix(rng, dim, rank=None):
    rank = rank or dim
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def heisenberg():
    return ModelParams(lam=1.0, delta=1.0, b=0.0)
