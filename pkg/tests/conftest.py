import math

import numpy as np
import pytest
from hypothesis import settings

from hilbert_geom import EllipseBody, Point, Polygon, distance

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

SQUARE = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]


@pytest.fixture
def square():
    return Polygon(SQUARE)


@pytest.fixture
def disk():
    return EllipseBody.disk()


@pytest.fixture
def unit_triangle():
    return Polygon([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


def regular_polygon(n, radius=1.0, phase=0.0, center=(0.0, 0.0)):
    return Polygon([(center[0] + radius * math.cos(phase + 2 * math.pi * k / n),
                     center[1] + radius * math.sin(phase + 2 * math.pi * k / n)) for k in range(n)])


def random_ellipse(rng, max_ratio=10.0):
    a1 = rng.uniform(0.5, 2.0)
    a2 = a1 / rng.uniform(1.0, max_ratio)
    return EllipseBody.from_axes(rng.uniform(-1, 1, 2), (a1, a2), rng.uniform(0, math.pi))


def random_convex_polygon(rng, n=5, min_gap=0.3):
    """n points at well-spread random angles on a random ellipse (hence convex, CCW)."""
    while True:
        th = np.sort(rng.uniform(0, 2 * math.pi, n))
        gaps = np.diff(np.append(th, th[0] + 2 * math.pi))
        if gaps.min() >= min_gap:
            break
    e = random_ellipse(rng, max_ratio=3.0)
    return Polygon([tuple(e.point_at_angle(t)) for t in th])


def random_interior_point(rng, body, margin=1e-3):
    x0, y0, x1, y1 = body.bounding_box()
    m = margin * body.diameter
    while True:
        p = Point(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if body.boundary_gap(p) > m:
            return p


def bisect_midpoint(body, p, q, iters=200):
    """Independent midpoint: bisect d(p, z) - d(z, q) along the segment pq."""
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        z = Point(p.x + mid * (q.x - p.x), p.y + mid * (q.y - p.y))
        if distance(body, p, z) < distance(body, z, q):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    lam = 0.5 * (lo + hi)
    return Point(p.x + lam * (q.x - p.x), p.y + lam * (q.y - p.y))


# -- acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number, title, ok, detail=""):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
