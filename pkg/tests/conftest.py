import numpy as np
import pytest
from hypothesis import settings

from fockflow import models

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture(scope="session")
def rho():
    return models.rotated_oscillator()


@pytest.fixture(scope="session")
def fp0():
    return models.fokker_planck_nf(0.5, 0.0)


@pytest.fixture(scope="session")
def chain():
    return models.chain_nf(1.0, 0.5)
