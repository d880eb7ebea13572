import numpy as np
import pytest

from spinpair.states import DensityMatrix, SpinSystemParams

SEED = 20260819


def random_density(rng) -> DensityMatrix:
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a @ a.conj().T
    return DensityMatrix(h / np.trace(h).real)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def random_states():
    r = np.random.default_rng(SEED)
    return [random_density(r) for _ in range(1000)]


@pytest.fixture(scope="session")
def params():
    return SpinSystemParams()
