import numpy as np
import pytest

import capabench as cb


@pytest.fixture(scope="session")
def disk64():
    return cb.build_domain(cb.Ball((0.0, 0.0), 1.0), 1 / 64)


@pytest.fixture(scope="session")
def square64():
    return cb.build_domain(cb.Box((0.0, 0.0), (1.0, 1.0)), 1 / 64)


@pytest.fixture(scope="session")
def ball32():
    return cb.build_domain(cb.Ball((0.0, 0.0, 0.0), 1.0), 1 / 32)


def rng(seed=0):
    return np.random.default_rng(seed)
