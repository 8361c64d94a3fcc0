import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from diracwt import Model, ScalarPotential

# numba warm-up on first kernel call would trip hypothesis' deadline.
settings.register_profile(
    "diracwt", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("diracwt")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def const_pot():
    return ScalarPotential.constant(1.0)


@pytest.fixture
def free_pot():
    return ScalarPotential.constant(0.0)


def bump_potential(values=(2.0,), breaks=(0.0, 1.0), tail=1.0):
    """Piecewise bump: constant tails, given cell values."""
    return ScalarPotential(np.asarray(breaks, dtype=float),
                           np.asarray(values, dtype=complex), tail, tail)


@pytest.fixture
def bump_pot():
    return bump_potential()


def random_potential(rng, tail=1.0, ncells=3, span=2.0):
    breaks = np.sort(rng.uniform(-span, span, size=ncells + 1))
    while np.diff(breaks).min() < 1e-3:
        breaks = np.sort(rng.uniform(-span, span, size=ncells + 1))
    vals = rng.normal(size=ncells) + 1j * rng.normal(size=ncells)
    return ScalarPotential(breaks, vals, tail, tail)


MODELS = (Model.DEFOCUSING, Model.FOCUSING)
