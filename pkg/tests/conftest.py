import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from boundarylab.space import IDENTITY, preset  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SPACE_NAMES = ["f2", "f3", "z2", "z3", "z2z"]


@pytest.fixture(scope="session")
def f2():
    return preset("f2")


@pytest.fixture(scope="session")
def z2():
    return preset("z2")


@pytest.fixture(scope="session")
def z2z():
    return preset("z2z")


def words(space, max_steps=10):
    """Strategy: products of random generators."""
    gens = space.generators

    def build(idx):
        w = IDENTITY
        for i in idx:
            w = space.multiply(w, gens[i])
        return w

    return st.lists(st.integers(0, len(gens) - 1), max_size=max_steps).map(build)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
