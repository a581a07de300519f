import math

import numpy as np
import pytest

from core.algebra import SE3Dual
from core.hamiltonians import TopParams
from core.maps import LiftGauge, lift

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

KOVALEVSKAYA_PI0 = np.array([2.0, 3.0, 4.0])
KOVALEVSKAYA_GAMMA0 = np.array([0.5, 0.0, SQRT3 / 2.0])
KOVALEVSKAYA_PSI0 = np.array([SQRT3 + 1.0, SQRT3 - 1.0]) / (2.0 * SQRT2)


def central_difference_gradient(fn, x, step=1e-6):
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        grad[j] = (fn(x + e) - fn(x - e)) / (2.0 * step)
    return grad


def central_difference_jacobian(fn, x, step=1e-6):
    x = np.asarray(x, dtype=np.float64)
    columns = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        columns.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2.0 * step))
    return np.stack(columns, axis=-1)


def relative_error(approx, exact) -> float:
    return float(np.linalg.norm(approx - exact) / max(np.linalg.norm(exact), 1e-300))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def kovalevskaya():
    return TopParams.kovalevskaya()


@pytest.fixture
def lagrange():
    return TopParams.lagrange(I1=2.0, I3=1.0)


@pytest.fixture
def general_params():
    c = np.array([0.3, -0.4, 0.5])
    return TopParams(I1=1.3, I2=2.1, I3=0.7, m=1.2, g=0.9, l=0.8, c=tuple(c / np.linalg.norm(c)))


@pytest.fixture
def initial_state():
    return SE3Dual(Pi=KOVALEVSKAYA_PI0, Gamma=KOVALEVSKAYA_GAMMA0)


@pytest.fixture
def initial_point(initial_state):
    return lift(initial_state, LiftGauge.fix_re_chi1(1.0))


@pytest.fixture
def random_points(rng):
    return rng.normal(size=(100, 8))
