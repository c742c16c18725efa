import numpy as np
import pytest

from hypstab.sysdef import EulerScenario, HyperbolicSystem, euler_symmetrized
from hypstab.symlin import SymMatrix


@pytest.fixture
def supersonic():
    return euler_symmetrized(EulerScenario(1.0, (3.0, 0.0), 1.0))


@pytest.fixture
def subsonic():
    return euler_symmetrized(EulerScenario(1.0, (0.5, 0.0), 1.0))


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.uniform(-1.0, 1.0, (n, n))
    return (m + m.T) / 2.0


def random_system(rng: np.random.Generator, d: int, n: int) -> HyperbolicSystem:
    jac = tuple(SymMatrix(random_symmetric(rng, n)) for _ in range(d))
    return HyperbolicSystem(jac, np.zeros((n, n)), label="random")
