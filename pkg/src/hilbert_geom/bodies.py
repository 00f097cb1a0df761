"""Convex bodies: CCW polygons and ellipses, chords, inflation, boundary hits.

An ellipse is stored as ``{center + shape @ u : |u| < 1}`` with ``shape``
symmetric positive definite, so its eigenvalues are the semi-axes.  Bodies are
validated once at construction and are immutable afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    CoincidentPoints,
    DegeneratePolygon,
    InvalidEllipse,
    PointsOutside,
    ValidationError,
)
from .geometry import TOL, Point, apply_projective, dist

MAX_ASPECT = 1e6


class Chord(NamedTuple):
    """Collinear ``a, p, q, b`` in that order; ``a`` and ``b`` on the boundary."""

    a: Point
    p: Point
    q: Point
    b: Point


@dataclass(frozen=True, eq=False)
class Polygon:
    vertices: tuple[Point, ...]
    normals: tuple[Point, ...] = field(init=False, repr=False)
    offsets: tuple[float, ...] = field(init=False, repr=False)
    diameter: float = field(init=False, repr=False)

    def __init__(self, vertices: Sequence[Sequence[float]]):
        pts = tuple(Point.of(v) for v in vertices)
        if len(pts) < 3:
            raise DegeneratePolygon(f"a polygon needs at least 3 vertices, got {len(pts)}")
        diam = max(dist(p, q) for i, p in enumerate(pts) for q in pts[i + 1:])
        if diam <= 0.0:
            raise DegeneratePolygon("all vertices coincide")
        n = len(pts)
        normals, offsets = [], []
        for i in range(n):
            p, q, r = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
            e1, e2 = q - p, r - q
            if e1.cross(e2) <= TOL * diam * diam:
                raise DegeneratePolygon(
                    f"vertex {(i + 1) % n} is not a strictly convex counterclockwise turn")
            ln = e1.norm()
            nrm = Point(e1.y / ln, -e1.x / ln)
            normals.append(nrm)
            offsets.append(nrm.dot(p))
        # strict convex turns everywhere can still wind around more than once
        turning = sum(math.atan2((pts[(i + 1) % n] - pts[i]).cross(pts[(i + 2) % n] - pts[(i + 1) % n]),
                                 (pts[(i + 1) % n] - pts[i]).dot(pts[(i + 2) % n] - pts[(i + 1) % n]))
                      for i in range(n))
        if abs(turning - 2 * math.pi) > 1e-6:
            raise DegeneratePolygon("vertices wind around more than once")
        width = min(max(off - nrm.dot(v) for v in pts) for nrm, off in zip(normals, offsets))
        if width <= 0.0 or diam / width > MAX_ASPECT:
            raise DegeneratePolygon(f"needle-like polygon (aspect ratio {diam / max(width, 1e-300):.3g})")
        object.__setattr__(self, "vertices", pts)
        object.__setattr__(self, "normals", tuple(normals))
        object.__setattr__(self, "offsets", tuple(offsets))
        object.__setattr__(self, "diameter", diam)

    def __repr__(self) -> str:
        return f"Polygon({[tuple(v) for v in self.vertices]})"

    @property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * sum(v[i].cross(v[(i + 1) % len(v)]) for i in range(len(v)))

    def edges(self) -> list[tuple[Point, Point]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def boundary_gap(self, pt: Sequence[float]) -> float:
        """Euclidean distance from an interior point to the boundary (negative outside)."""
        return min(off - nrm.x * pt[0] - nrm.y * pt[1] for nrm, off in zip(self.normals, self.offsets))

    def contains(self, pt: Sequence[float], margin: float = 0.0) -> bool:
        x, y = pt[0], pt[1]
        for nrm, off in zip(self.normals, self.offsets):
            if nrm.x * x + nrm.y * y - off >= -margin:
                return False
        return True

    def ray_params(self, p: Sequence[float], d: Sequence[float]) -> tuple[float, float]:
        """Parameters ``t_lo < 0 < t_hi`` where ``p + t*d`` leaves the polygon."""
        lo, hi = -math.inf, math.inf
        for nrm, off in zip(self.normals, self.offsets):
            nd = nrm.x * d[0] + nrm.y * d[1]
            gap = off - nrm.x * p[0] - nrm.y * p[1]
            if nd > 0.0:
                hi = min(hi, gap / nd)
            elif nd < 0.0:
                lo = max(lo, gap / nd)
        return lo, hi

    def bounding_box(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def projective_image(self, h: np.ndarray) -> "Polygon":
        pts = [apply_projective(h, v) for v in self.vertices]
        area2 = sum(pts[i].cross(pts[(i + 1) % len(pts)]) for i in range(len(pts)))
        return Polygon(pts if area2 > 0 else pts[::-1])

    def affine_image(self, m: np.ndarray, t: Sequence[float]) -> "Polygon":
        pts = [Point(*(np.asarray(m) @ np.asarray(v) + np.asarray(t))) for v in self.vertices]
        if np.linalg.det(m) < 0:
            pts = pts[::-1]
        return Polygon([(float(p.x), float(p.y)) for p in pts])


@dataclass(frozen=True, eq=False)
class EllipseBody:
    center: Point
    shape: np.ndarray
    _inv: tuple[float, float, float] = field(init=False, repr=False)

    def __post_init__(self):
        c = Point.of(self.center)
        s = np.array(self.shape, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(s)):
            raise InvalidEllipse("non-finite shape matrix")
        scale = float(np.abs(s).max())
        if scale == 0.0 or abs(s[0, 1] - s[1, 0]) > 1e-12 * scale:
            raise InvalidEllipse("shape must be a nonzero symmetric matrix")
        s[0, 1] = s[1, 0] = 0.5 * (s[0, 1] + s[1, 0])
        ev = np.linalg.eigvalsh(s)
        if ev[0] <= 0.0:
            raise InvalidEllipse(f"shape is not positive definite (eigenvalues {ev})")
        if ev[1] / ev[0] > MAX_ASPECT:
            raise InvalidEllipse(f"needle-like ellipse (axis ratio {ev[1] / ev[0]:.3g})")
        s.setflags(write=False)
        a, b, d = s[0, 0], s[0, 1], s[1, 1]
        det = a * d - b * b
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", s)
        object.__setattr__(self, "_inv", (float(d / det), float(-b / det), float(a / det)))

    @classmethod
    def from_axes(cls, center: Sequence[float], semi_axes: Sequence[float],
                  rotation: float = 0.0) -> "EllipseBody":
        a1, a2 = float(semi_axes[0]), float(semi_axes[1])
        if not (a1 > 0 and a2 > 0):
            raise InvalidEllipse(f"semi-axes must be positive, got {a1}, {a2}")
        c, s = math.cos(rotation), math.sin(rotation)
        r = np.array([[c, -s], [s, c]])
        return cls(Point.of(center), r @ np.diag([a1, a2]) @ r.T)

    @classmethod
    def from_map(cls, center: Sequence[float], m: np.ndarray) -> "EllipseBody":
        """The image of the unit disk under ``u -> center + m @ u`` (any invertible ``m``)."""
        m = np.asarray(m, dtype=float)
        w, v = np.linalg.eigh(m @ m.T)
        if w[0] <= 0.0:
            raise InvalidEllipse("map is singular")
        return cls(Point.of(center), v @ np.diag(np.sqrt(w)) @ v.T)

    @classmethod
    def disk(cls, radius: float = 1.0, center: Sequence[float] = (0.0, 0.0)) -> "EllipseBody":
        return cls.from_axes(center, (radius, radius))

    @property
    def semi_axes(self) -> tuple[float, float]:
        w = np.linalg.eigvalsh(self.shape)
        return float(w[1]), float(w[0])

    @property
    def rotation(self) -> float:
        """Angle of the major axis, in ``(-pi/2, pi/2]``."""
        w, v = np.linalg.eigh(self.shape)
        if w[1] - w[0] <= 1e-12 * w[1]:
            return 0.0
        ang = math.atan2(v[1, 1], v[0, 1])
        if ang <= -math.pi / 2:
            ang += math.pi
        elif ang > math.pi / 2:
            ang -= math.pi
        return ang

    @property
    def area(self) -> float:
        return math.pi * float(np.linalg.det(self.shape))

    @property
    def diameter(self) -> float:
        return 2.0 * self.semi_axes[0]

    def to_unit(self, pt: Sequence[float]) -> tuple[float, float]:
        """Coordinates ``u`` with ``pt = center + shape @ u``."""
        i11, i12, i22 = self._inv
        rx, ry = pt[0] - self.center.x, pt[1] - self.center.y
        return i11 * rx + i12 * ry, i12 * rx + i22 * ry

    def from_unit(self, u: Sequence[float]) -> Point:
        s = self.shape
        return Point(self.center.x + s[0, 0] * u[0] + s[0, 1] * u[1],
                     self.center.y + s[1, 0] * u[0] + s[1, 1] * u[1])

    def level(self, pt: Sequence[float]) -> float:
        """``|u|^2``: below 1 inside, 1 on the boundary."""
        u = self.to_unit(pt)
        return u[0] * u[0] + u[1] * u[1]

    def boundary_gap(self, pt: Sequence[float]) -> float:
        """A lower bound on the distance to the boundary (negative outside)."""
        return (1.0 - math.sqrt(self.level(pt))) * self.semi_axes[1]

    def contains(self, pt: Sequence[float], margin: float = 0.0) -> bool:
        return math.sqrt(self.level(pt)) < 1.0 - margin / self.semi_axes[1]

    def ray_params(self, p: Sequence[float], d: Sequence[float]) -> tuple[float, float]:
        w0 = self.to_unit(p)
        i11, i12, i22 = self._inv
        w1 = (i11 * d[0] + i12 * d[1], i12 * d[0] + i22 * d[1])
        qa = w1[0] * w1[0] + w1[1] * w1[1]
        qb = w0[0] * w1[0] + w0[1] * w1[1]
        qc = w0[0] * w0[0] + w0[1] * w0[1] - 1.0
        disc = qb * qb - qa * qc
        if qa == 0.0 or disc < 0.0:
            return math.nan, math.nan
        root = math.sqrt(disc)
        # the stable pair of roots of qa*t^2 + 2*qb*t + qc
        k = -(qb + math.copysign(root, qb))
        if k == 0.0:
            return -math.sqrt(-qc / qa), math.sqrt(-qc / qa)
        t1, t2 = k / qa, qc / k
        return (t1, t2) if t1 < t2 else (t2, t1)

    def bounding_box(self) -> tuple[float, float, float, float]:
        s = self.shape
        hx = math.hypot(s[0, 0], s[0, 1])
        hy = math.hypot(s[1, 0], s[1, 1])
        return self.center.x - hx, self.center.y - hy, self.center.x + hx, self.center.y + hy

    def point_at_angle(self, theta: float) -> Point:
        return self.from_unit((math.cos(theta), math.sin(theta)))

    def to_conic(self) -> np.ndarray:
        """Symmetric 3x3 ``Q`` with ``[z, 1] Q [z, 1]^T = |u|^2 - 1``."""
        inv = np.linalg.inv(self.shape)
        a = inv @ inv
        c = np.array(self.center)
        q = np.empty((3, 3))
        q[:2, :2] = a
        q[:2, 2] = q[2, :2] = -a @ c
        q[2, 2] = c @ a @ c - 1.0
        return q

    @classmethod
    def from_conic(cls, q: np.ndarray) -> "EllipseBody":
        q = 0.5 * (q + q.T)
        a = q[:2, :2]
        if np.linalg.det(a) <= 0:
            raise InvalidEllipse("conic is not an ellipse")
        if a[0, 0] < 0:
            q, a = -q, -a
        c = -np.linalg.solve(a, q[:2, 2])
        k = c @ a @ c - q[2, 2]
        if k <= 0:
            raise InvalidEllipse("conic has no real points")
        w, v = np.linalg.eigh(a / k)
        return cls(Point(float(c[0]), float(c[1])), v @ np.diag(1.0 / np.sqrt(w)) @ v.T)

    def projective_image(self, h: np.ndarray) -> "EllipseBody":
        hinv = np.linalg.inv(h)
        return EllipseBody.from_conic(hinv.T @ self.to_conic() @ hinv)

    def affine_image(self, m: np.ndarray, t: Sequence[float]) -> "EllipseBody":
        m = np.asarray(m, dtype=float)
        return EllipseBody.from_map(m @ np.asarray(self.center) + np.asarray(t), m @ self.shape)


ConvexBody = Union[Polygon, EllipseBody]


def contains(body: ConvexBody, pt: Sequence[float], margin: float = 0.0) -> bool:
    return body.contains(pt, margin)


def ray_exit(body: ConvexBody, origin: Sequence[float], direction: Sequence[float]) -> Point:
    """Where the ray from an interior ``origin`` along ``direction`` hits the boundary."""
    _, hi = body.ray_params(origin, direction)
    if not math.isfinite(hi) or hi <= 0.0:
        raise PointsOutside(f"ray origin {tuple(origin)} is not inside the body")
    return Point(origin[0] + hi * direction[0], origin[1] + hi * direction[1])


def chord_through(body: ConvexBody, p: Point, q: Point) -> Chord:
    if not (body.contains(p) and body.contains(q)):
        raise PointsOutside(f"chord points {tuple(p)}, {tuple(q)} must be interior")
    d = Point(q[0] - p[0], q[1] - p[1])
    if d.norm() <= TOL * body.diameter:
        raise CoincidentPoints("chord needs two distinct points")
    lo, hi = body.ray_params(p, d)
    a = Point(p[0] + lo * d.x, p[1] + lo * d.y)
    b = Point(p[0] + hi * d.x, p[1] + hi * d.y)
    return Chord(a, Point(*p), Point(*q), b)


def inflate(e: EllipseBody, eps: float) -> EllipseBody:
    """Scale ``e`` about its center so ``|u|^2 < 1 + eps`` becomes the new unit level."""
    if not eps > 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    return EllipseBody(e.center, np.asarray(e.shape) * math.sqrt(1.0 + eps))


def boundary_intersections(e: EllipseBody, k: Polygon) -> list[Point]:
    """Points of ``boundary(e) & boundary(k)``, deduplicated, sorted by angle about e's center."""
    merge = 1e-7 * k.diameter
    hits: list[Point] = []
    for v0, v1 in k.edges():
        w0 = e.to_unit(v0)
        w1 = e.to_unit(v1)
        dw = (w1[0] - w0[0], w1[1] - w0[1])
        qa = dw[0] * dw[0] + dw[1] * dw[1]
        qb = w0[0] * dw[0] + w0[1] * dw[1]
        qc = w0[0] * w0[0] + w0[1] * w0[1] - 1.0
        disc = qb * qb - qa * qc
        if disc < -1e-14 * qa:
            continue
        root = math.sqrt(max(disc, 0.0))
        for s in ((-qb - root) / qa, (-qb + root) / qa):
            if -1e-12 <= s <= 1.0 + 1e-12:
                s = min(max(s, 0.0), 1.0)
                hits.append(Point(v0.x + s * (v1.x - v0.x), v0.y + s * (v1.y - v0.y)))
    cx, cy = e.center
    hits.sort(key=lambda p: math.atan2(p.y - cy, p.x - cx))
    out: list[Point] = []
    for p in hits:
        if not any(dist(p, r) <= merge for r in out):
            out.append(p)
    return out
