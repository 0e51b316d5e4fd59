import functools

import numpy as np
import pytest

from clarktorus import catalog, construct_clark
from clarktorus.measures import QuadratureSpec

INNER = ("coordinate", "product", "rational_example")


def turns(t):
    return complex(np.exp(2j * np.pi * t))


@functools.lru_cache(maxsize=None)
def clark(name, t, nodes=512):
    """Cached Clark measure and certificate of a catalog map at ``alpha = e^{2 pi i t}``."""
    return construct_clark(catalog(name), turns(t), QuadratureSpec(nodes_per_dim=nodes))


def disc_panel(rng, count, n=2, radius=0.9):
    r = radius * np.sqrt(rng.uniform(size=(count, n)))
    return r * np.exp(2j * np.pi * rng.uniform(size=(count, n)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
