import random

import pytest
from hypothesis import strategies as st

from sharedcache.model import (
    Association,
    SystemParams,
    association_from_profile,
    random_profile,
    worst_case_demand,
)

EXAMPLE_ASSOC = Association(((1, 2, 3, 4, 5, 6, 7, 8), (9, 10, 11, 12, 13), (14, 15)))
EXAMPLE_PARAMS = SystemParams(num_files=15, num_users=15, num_caches=3, antennas=2, t=1)
EXAMPLE_DEMAND = tuple(range(1, 16))


@pytest.fixture
def example_instance():
    return EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS


def make_instance(rng, max_caches=5, max_users=14, antennas=None, extra_files=3):
    lam = rng.randint(1, max_caches)
    n0 = antennas if antennas is not None else rng.randint(1, 3)
    k = rng.randint(max(lam, n0), max(max_users, lam, n0))
    profile = random_profile(rng, k, lam, min_nonzero=n0)
    assoc = association_from_profile(profile, rng.randrange(1 << 30))
    params = SystemParams(k + rng.randint(0, extra_files), k, lam, n0, rng.randint(0, lam))
    demand = worst_case_demand(params, rng.randrange(1 << 30))
    return assoc, demand, params


@st.composite
def instances(draw, max_caches=5, max_users=14, antennas=None):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return make_instance(random.Random(seed), max_caches, max_users, antennas)


@st.composite
def profiles(draw, max_caches=8, max_users=40, min_nonzero=1):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = random.Random(seed)
    lam = draw(st.integers(min_value=1, max_value=max_caches))
    k = draw(st.integers(min_value=max(lam, min_nonzero), max_value=max_users))
    return random_profile(rng, k, lam, min_nonzero=min_nonzero)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
