"""Hilbert distance, closed-form midpoints, medians and the concurrency defect."""

from __future__ import annotations

import math
from typing import NamedTuple

from .bodies import ConvexBody, chord_through
from .errors import DegenerateTriangle, OrderViolation, PointsOutside
from .geometry import (
    Line,
    Point,
    cross_ratio,
    dist,
    intersect_lines,
    line_through,
    twice_signed_area,
)

# vertices closer than this (times the body diameter) to the boundary are rejected
BOUNDARY_MARGIN = 1e-6
COINCIDENT = 1e-12


class Triangle(NamedTuple):
    A: Point
    B: Point
    C: Point

    @property
    def diameter(self) -> float:
        return max(dist(self.A, self.B), dist(self.B, self.C), dist(self.A, self.C))

    def validate(self, tol: float = 1e-9) -> "Triangle":
        d = self.diameter
        if d == 0.0 or abs(twice_signed_area(*self)) <= tol * d * d:
            raise DegenerateTriangle(f"triangle {[tuple(p) for p in self]} is degenerate")
        return self


class MedianReport(NamedTuple):
    midpoints: tuple[Point, Point, Point]
    medians: tuple[Line, Line, Line]
    pairwise_meets: tuple[Point, Point, Point]
    defect: float


def _require_interior(body: ConvexBody, *pts: Point) -> None:
    margin = BOUNDARY_MARGIN * body.diameter
    for p in pts:
        if body.boundary_gap(p) <= margin:
            raise PointsOutside(f"point {tuple(p)} is outside or within {margin:.3g} of the boundary")


def distance(body: ConvexBody, x: Point, y: Point) -> float:
    """Half the log of the cross-ratio of ``x, y`` with the ends of their chord."""
    if not (body.contains(x) and body.contains(y)):
        raise PointsOutside(f"points {tuple(x)}, {tuple(y)} must be interior")
    if dist(x, y) <= COINCIDENT * body.diameter:
        return 0.0
    a, _, _, b = chord_through(body, x, y)
    return 0.5 * math.log(cross_ratio(a, x, y, b))


def midpoint_line_coords(s: float, t: float, L: float) -> float:
    """Hilbert midpoint of ``s <= t`` on the chord ``(0, L)`` of the real line.

    Solves ``(0, s, m, L) = (0, m, t, L)``, i.e.
    ``m**2 (L-s)(L-t) = s t (L-m)**2``.  With ``s = 1`` this is the map
    ``x -> sqrt(b) x / (sqrt(b) + sqrt((x-1)(x-b)))`` for ``t = b, L = x``,
    which is decreasing in ``x``.
    """
    if not (0.0 < s <= t < L):
        raise OrderViolation(f"need 0 < s <= t < L, got s={s!r}, t={t!r}, L={L!r}")
    g = math.sqrt(s * t)
    return L * g / (g + math.sqrt((L - s) * (L - t)))


def midpoint(body: ConvexBody, p: Point, q: Point) -> Point:
    if not (body.contains(p) and body.contains(q)):
        raise PointsOutside(f"points {tuple(p)}, {tuple(q)} must be interior")
    if dist(p, q) < COINCIDENT:
        return Point(*p)
    a, _, _, b = chord_through(body, p, q)
    L = dist(a, b)
    ux, uy = (b.x - a.x) / L, (b.y - a.y) / L
    s = dist(a, p)
    t = dist(a, q)
    m = midpoint_line_coords(s, t, L)
    return Point(a.x + m * ux, a.y + m * uy)


def concurrency_defect(lines: tuple[Line, Line, Line], scale: float) -> tuple[tuple[Point, Point, Point], float]:
    """Pairwise meets of three lines and the largest meet-to-third-line gap over ``scale``."""
    l1, l2, l3 = lines
    meets = (intersect_lines(l2, l3), intersect_lines(l1, l3), intersect_lines(l1, l2))
    gaps = (abs(l1.signed_distance(meets[0])),
            abs(l2.signed_distance(meets[1])),
            abs(l3.signed_distance(meets[2])))
    return meets, max(gaps) / scale


def median_report(body: ConvexBody, t: Triangle) -> MedianReport:
    t = Triangle(*(Point(*p) for p in t)).validate()
    _require_interior(body, *t)
    A, B, C = t
    mids = (midpoint(body, B, C), midpoint(body, A, C), midpoint(body, A, B))
    medians = (line_through(A, mids[0]), line_through(B, mids[1]), line_through(C, mids[2]))
    meets, defect = concurrency_defect(medians, t.diameter)
    return MedianReport(mids, medians, meets, defect)
