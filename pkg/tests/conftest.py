import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from metriq.geometry import ConvexPolygon, HalfSpace, PuncturedPlane, Sector, UnitBall
from metriq.oracle import RECTANGLE

settings.register_profile(
    "metriq",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("metriq")

CONVEX = {
    "halfplane": HalfSpace(2),
    "disk": UnitBall(2),
    "sector_pi6": Sector(math.pi / 6),
    "sector_pi2": Sector(math.pi / 2),
    "sector_2": Sector(2.0),
    "sector_pi": Sector(math.pi),
    "rectangle": RECTANGLE,
    "triangle": ConvexPolygon(((0.0, 0.0), (2.0, 0.0), (0.5, 1.5))),
}
NONCONVEX = {
    "sector_3pi2": Sector(3 * math.pi / 2),
    "punctured": PuncturedPlane(((0.0, 0.0), (1.0, 0.0))),
}
ALL = {**CONVEX, **NONCONVEX}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def dense_boundary(d, n=200_000):
    """Points densely covering the boundary (truncated for unbounded domains)."""
    t = np.linspace(0.0, 1.0, n)
    if isinstance(d, HalfSpace):
        return np.stack([40 * t - 20, np.zeros(n)], -1)
    if isinstance(d, UnitBall):
        a = 2 * math.pi * t
        return np.stack([np.cos(a), np.sin(a)], -1)
    if isinstance(d, Sector):
        r = 30 * t
        return np.concatenate([np.stack([r, 0 * r], -1), r[:, None] * np.array([math.cos(d.theta), math.sin(d.theta)])])
    if isinstance(d, ConvexPolygon):
        v = d.vertex_array
        segs = [v[i] + t[:, None] * (v[(i + 1) % len(v)] - v[i]) for i in range(len(v))]
        return np.concatenate(segs)
    if isinstance(d, PuncturedPlane):
        return np.array(d.punctures, dtype=float)
    raise TypeError(d)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
