"""Planar primitives: points, normalized lines, chord charts and the cross-ratio.

Everything here works on plain Python floats; the hot loops of the metric
(chords, midpoints, medians) call these functions millions of times in the
test sweeps, and numpy's per-call overhead on 2-vectors dominates there.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    CoincidentPoints,
    DegenerateRatio,
    NonCollinear,
    OffLine,
    Parallel,
    ValidationError,
)

TOL = 1e-9


class Point(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def __mul__(self, s):  # type: ignore[override]
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self):
        return Point(-self.x, -self.y)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def cross(self, other) -> float:
        return self.x * other[1] - self.y * other[0]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    @classmethod
    def of(cls, xy: Sequence[float]) -> "Point":
        """Build a point from any length-2 sequence, rejecting non-finite values."""
        if len(xy) != 2:
            raise ValidationError(f"expected 2 coordinates, got {len(xy)}")
        x, y = float(xy[0]), float(xy[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValidationError(f"non-finite point ({x}, {y})")
        return cls(x, y)


def dist(p: Sequence[float], q: Sequence[float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def lerp(p: Point, q: Point, t: float) -> Point:
    return Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))


class Line(NamedTuple):
    """The locus ``alpha*x + beta*y + gamma = 0`` with ``alpha**2 + beta**2 == 1``."""

    alpha: float
    beta: float
    gamma: float

    def signed_distance(self, p: Sequence[float]) -> float:
        return self.alpha * p[0] + self.beta * p[1] + self.gamma


def line_through(p: Point, q: Point, tol: float = TOL) -> Line:
    dx, dy = q[0] - p[0], q[1] - p[1]
    n = math.hypot(dx, dy)
    if n <= tol:
        raise CoincidentPoints(f"points {tuple(p)} and {tuple(q)} coincide")
    alpha, beta = -dy / n, dx / n
    return Line(alpha, beta, -(alpha * p[0] + beta * p[1]))


def intersect_lines(l1: Line, l2: Line, tol: float = TOL) -> Point:
    det = l1.alpha * l2.beta - l2.alpha * l1.beta
    if abs(det) < tol:
        raise Parallel(f"lines {tuple(l1)} and {tuple(l2)} are parallel")
    x = (l1.beta * l2.gamma - l2.beta * l1.gamma) / det
    y = (l2.alpha * l1.gamma - l1.alpha * l2.gamma) / det
    return Point(x, y)


def cross_ratio(a: Point, x: Point, y: Point, b: Point, tol: float = TOL) -> float:
    """Return ``(|y-a|/|x-a|) * (|x-b|/|y-b|)`` for four collinear points.

    Unsigned: the ordering a, x, y, b is the caller's business.  Collinearity
    is measured as the distance of x and y from line ab relative to ``|b-a|``.
    """
    ab = dist(a, b)
    if ab <= tol:
        raise DegenerateRatio("chord endpoints coincide")
    ux, uy = (b[0] - a[0]) / ab, (b[1] - a[1]) / ab
    for p in (x, y):
        off = abs(ux * (p[1] - a[1]) - uy * (p[0] - a[0]))
        if off > tol * ab:
            raise NonCollinear(f"point {tuple(p)} is {off:.3g} off the chord line")
    xa, yb = dist(x, a), dist(y, b)
    if xa <= tol * ab or yb <= tol * ab:
        raise DegenerateRatio("interior point coincides with a chord endpoint")
    return (dist(y, a) / xa) * (dist(x, b) / yb)


class ChordFrame(NamedTuple):
    """Affine chart of a line: ``p = origin + (unit * t) * direction``.

    ``unit`` sets the length of one chart unit, which lets the chart send a
    chosen point to 1 (e.g. origin at p5 with C at coordinate 1).
    """

    origin: Point
    direction: Point
    unit: float = 1.0

    @classmethod
    def through(cls, origin: Point, toward: Point, one: Point | None = None) -> "ChordFrame":
        d = Point(toward[0] - origin[0], toward[1] - origin[1])
        n = d.norm()
        if n == 0.0:
            raise CoincidentPoints("chart direction is undefined")
        frame = cls(Point(*origin), d * (1.0 / n))
        if one is not None:
            frame = frame._replace(unit=chord_coordinate(frame, one))
            if frame.unit <= 0.0:
                raise OffLine("unit point is not on the positive side of the chart")
        return frame

    def point_at(self, t: float) -> Point:
        s = t * self.unit
        return Point(self.origin.x + s * self.direction.x, self.origin.y + s * self.direction.y)


def chord_coordinate(frame: ChordFrame, p: Point, tol: float = TOL) -> float:
    rx, ry = p[0] - frame.origin.x, p[1] - frame.origin.y
    ux, uy = frame.direction
    off = abs(ux * ry - uy * rx)
    scale = max(1.0, math.hypot(rx, ry))
    if off > tol * scale:
        raise OffLine(f"point {tuple(p)} is {off:.3g} off the chart line")
    return (ux * rx + uy * ry) / frame.unit


def twice_signed_area(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


# -- projective maps (used by the invariance checks) --------------------------

def apply_projective(h: np.ndarray, p: Sequence[float], min_w: float = 1e-9) -> Point:
    """Apply the 3x3 homography ``h`` to ``p``; reject images near infinity."""
    x = h[0, 0] * p[0] + h[0, 1] * p[1] + h[0, 2]
    y = h[1, 0] * p[0] + h[1, 1] * p[1] + h[1, 2]
    w = h[2, 0] * p[0] + h[2, 1] * p[1] + h[2, 2]
    if abs(w) < min_w:
        raise ValidationError("projective image is (nearly) at infinity")
    return Point(float(x / w), float(y / w))


def random_projective(rng: np.random.Generator, strength: float = 0.3,
                      radius: float = 1.0, margin: float = 0.25) -> np.ndarray:
    """A random homography whose singular line stays off the disk of ``radius``.

    With ``w = h31*x + h32*y + 1`` and ``|(h31, h32)| * radius <= 1 - margin``
    the image of the closed disk stays bounded, with ``w >= margin`` on it.
    """
    h = np.eye(3) + strength * rng.standard_normal((3, 3))
    h[2, 2] = 1.0
    v = rng.standard_normal(2)
    v *= (1.0 - margin) * rng.uniform(0.0, 1.0) / (radius * np.linalg.norm(v))
    h[2, :2] = v
    while abs(np.linalg.det(h)) < 1e-3:
        h[:2, :2] += 0.1 * np.eye(2)
    return h
