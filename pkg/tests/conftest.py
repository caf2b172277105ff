import sys

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from sigkern.paths import PiecewiseLinearPath

settings.register_profile("default", deadline=None, max_examples=30, derandomize=True)
settings.load_profile("default")


def random_path(rng, n_seg=4, d=2, length=1.0, t0=0.0, t1=1.0):
    """Random piecewise-linear path with total length ``length``."""
    inc = rng.normal(size=(n_seg, d))
    inc *= length / np.linalg.norm(inc, axis=1).sum()
    pts = np.vstack([np.zeros(d), np.cumsum(inc, axis=0)])
    cuts = np.sort(rng.uniform(t0, t1, n_seg - 1))
    times = np.concatenate([[t0], cuts, [t1]])
    return PiecewiseLinearPath(times, pts)


def unit_line(d=1, speed=1.0):
    v = np.zeros(d)
    v[0] = speed
    return PiecewiseLinearPath([0.0, 1.0], np.vstack([np.zeros(d), v]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def paths(draw, d=2, max_seg=5, max_len=1.0):
    n = draw(st.integers(1, max_seg))
    seed = draw(st.integers(0, 2**31 - 1))
    length = draw(st.floats(0.05, max_len))
    return random_path(np.random.default_rng(seed), n, d, length)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
