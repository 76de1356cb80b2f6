import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from minterp.generate import random_pair, random_trivial
from minterp.pairspace import CompatiblePair, InterpParams

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

INSTANCES = Path(__file__).resolve().parent.parent / "instances"

THETAS = (0.25, 0.5, 0.75)
QS = (1.0, 2.0, math.inf)
GRID = [InterpParams(th, q) for th in THETAS for q in QS]

seeds = st.integers(0, 2**32 - 1)
thetas = st.floats(0.05, 0.95)
qs = st.one_of(st.just(math.inf), st.floats(1.0, 8.0))
params_st = st.builds(InterpParams, thetas, qs)


def pair_from_seed(seed: int, n_max: int = 6, **kw) -> CompatiblePair:
    return random_pair(np.random.default_rng(seed), n_max, **kw)


def trivial_from_seed(seed: int, n_max: int = 6) -> CompatiblePair:
    return random_trivial(np.random.default_rng(seed), n_max)


pairs = seeds.map(pair_from_seed)
small_pairs = seeds.map(lambda s: pair_from_seed(s, 5, max_intersection=3))


def load(name: str) -> CompatiblePair:
    import json

    return CompatiblePair.from_dict(json.loads((INSTANCES / name).read_text()))


@pytest.fixture
def e1() -> CompatiblePair:
    """X0 = X1 = {a, b}, d0 = 2, d1 = 3, dX = 1."""
    return load("e1.json")


@pytest.fixture
def e3() -> CompatiblePair:
    """X0 = {a, m}, X1 = {m, b}; the only link from a to b goes through m."""
    return load("e3.json")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
