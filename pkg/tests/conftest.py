import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / 'src'))

from wagener_hull.geom import Point2  # noqa: E402
from wagener_hull.hoodbuf import HoodBuffer  # noqa: E402
from wagener_hull.oracle import oracle_upper_hull  # noqa: E402

A = Point2(0.1, 0.5)
B = Point2(0.2, 0.6)
C = Point2(0.6, 0.9)
D = Point2(0.7, 0.2)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size acceptance grids")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def e1_points():
    return [A, B, C, D]


@pytest.fixture
def e1_buffer():
    return HoodBuffer((A, B, C, D), 2)


@pytest.fixture
def stale_buffer():
    """Two 4-corner hoods whose common tangent runs from P's first to Q's last corner."""
    P = [Point2(0.05, 0.9), Point2(0.10, 0.8), Point2(0.15, 0.6), Point2(0.20, 0.3)]
    Q = [Point2(0.80, 0.3), Point2(0.85, 0.6), Point2(0.90, 0.8), Point2(0.95, 0.9)]
    return HoodBuffer(tuple(P + Q), 4)


def random_hood_pair(rng: np.random.Generator, d: int, max_tries: int = 50) -> HoodBuffer:
    """A buffer of two blocks of size d, each the hood of d random points."""
    for _ in range(max_tries):
        xs = np.sort(rng.uniform(0.0, 1.0, 2 * d))
        if np.min(np.diff(xs)) < 1e-6:
            continue
        ys = rng.uniform(0.0, 1.0, 2 * d)
        pts = [Point2(float(x), float(y)) for x, y in zip(xs, ys)]
        return HoodBuffer.from_blocks([oracle_upper_hull(pts[:d]), oracle_upper_hull(pts[d:])], d)
    raise RuntimeError("could not draw a hood pair")


@pytest.fixture
def hood_pair_factory():
    return random_hood_pair
