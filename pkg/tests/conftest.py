import random
from fractions import Fraction

import pytest

from wavegraph.samples import g1, g3, random_metric_graph, random_horizon


@pytest.fixture(scope="session")
def G1():
    return g1()


@pytest.fixture(scope="session")
def G3():
    return g3()


@pytest.fixture(scope="session")
def small_graphs():
    """A deterministic batch of random valid graphs with horizons."""
    rng = random.Random(20240811)
    out = []
    while len(out) < 12:
        g = random_metric_graph(rng)
        out.append((g, random_horizon(rng, g)))
    return out


def F(*args) -> Fraction:
    return Fraction(*args)
