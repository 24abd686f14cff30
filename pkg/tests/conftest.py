import numpy as np
import pytest

from rqkp.model import ReducedInstance


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_reduced(rng, n, feasible=True, integer=False):
    if integer:
        a = rng.integers(-10, 11, n).astype(float)
        c = rng.integers(-20, 21, n).astype(float)
        u = rng.integers(1, 10, n).astype(float)
    else:
        a = rng.normal(size=n) * 5
        c = rng.normal(size=n) * 10
        u = rng.uniform(0.5, 8.0, n)
    theta = rng.uniform(0.05, 0.95, n)
    b = float(a @ (theta * u)) if feasible else float(np.abs(a) @ u + 1.0)
    return ReducedInstance(a=a, b=b, c=c, u=u)
