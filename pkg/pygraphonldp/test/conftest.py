import numpy as np
import pytest

from pygraphonldp.Graphon import Graphon
from pygraphonldp.Reference import rank1_reference


def symmetric_uniform(rng, m, lo=0.0, hi=1.0):
    A = rng.uniform(lo, hi, (m, m))
    return np.triu(A) + np.triu(A, 1).T


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def random_graphon(rng):
    def make(m, lo=0.0, hi=1.0):
        return Graphon(symmetric_uniform(rng, m, lo, hi))

    return make


@pytest.fixture
def random_symmetric(rng):
    def make(m, lo=-1.0, hi=1.0):
        return symmetric_uniform(rng, m, lo, hi)

    return make


@pytest.fixture
def half32():
    return Graphon.constant(32, 0.5)


@pytest.fixture
def xy():
    # r(x, y) = xy; the cell averages coincide with the midpoint grid
    def make(m):
        return rank1_reference(m, [0.0, 1.0])

    return make
