import math

import numpy as np
import pytest

from nhfloquet.model import DriveParams


def random_params(rng, bound=5.0, gamma_max=None, theta=None) -> DriveParams:
    """Uniform draw with every hopping in [-bound, bound] and |gamma| <= gamma_max."""
    t1, t2, mu, w1, w2 = rng.uniform(-bound, bound, 5)
    g0 = rng.uniform(0, bound if gamma_max is None else gamma_max)
    th = rng.uniform(0, 2 * math.pi) if theta is None else theta
    return DriveParams(t1=t1, t2=t2, gamma0=g0, theta=th, mu=mu, omega1=w1, omega2=w2)


@pytest.fixture
def rng():
    return np.random.default_rng(20211014)


FIG1_C = DriveParams(t1=0.01, gamma0=0.1, omega1=1.0)
FIG1_D = DriveParams(t1=10.0, gamma0=0.1, omega1=1.0)
