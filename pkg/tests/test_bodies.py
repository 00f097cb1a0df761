import math

import numpy as np
import pytest
from conftest import random_convex_polygon, random_ellipse, random_interior_point, regular_polygon

from hilbert_geom import (
    EllipseBody,
    Point,
    Polygon,
    Triangle,
    boundary_intersections,
    chord_through,
    contains,
    cross_ratio,
    inflate,
    steiner_inellipse,
)
from hilbert_geom.errors import CoincidentPoints, DegeneratePolygon, InvalidEllipse, PointsOutside


def test_contains_examples(disk, square):
    assert contains(disk, Point(0, 0))
    assert not contains(disk, Point(1, 0))
    assert contains(square, Point(0.999, 0.999))
    assert not contains(square, Point(1.0, 0.3))


def test_polygon_validation():
    with pytest.raises(DegeneratePolygon):
        Polygon([(0, 0), (1, 0)])
    with pytest.raises(DegeneratePolygon):  # clockwise
        Polygon([(0, 0), (0, 1), (1, 0)])
    with pytest.raises(DegeneratePolygon):  # reflex vertex
        Polygon([(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)])
    with pytest.raises(DegeneratePolygon):  # collinear vertex
        Polygon([(0, 0), (1, 0), (2, 0), (1, 1)])
    with pytest.raises(DegeneratePolygon):  # pentagram winds twice
        Polygon([(math.cos(4 * math.pi * k / 5), math.sin(4 * math.pi * k / 5)) for k in range(5)])
    with pytest.raises(DegeneratePolygon):  # needle
        Polygon([(0, 0), (1e7, 0), (1e7, 1), (0, 1)])


def test_ellipse_validation():
    with pytest.raises(InvalidEllipse):
        EllipseBody(Point(0, 0), np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(InvalidEllipse):
        EllipseBody(Point(0, 0), np.array([[1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(InvalidEllipse):
        EllipseBody.from_axes((0, 0), (1.0, 0.0))


def test_ellipse_axes_round_trip():
    e = EllipseBody.from_axes((1, 2), (3.0, 0.5), 0.4)
    assert e.semi_axes == pytest.approx((3.0, 0.5), rel=1e-14)
    assert e.rotation == pytest.approx(0.4, abs=1e-14)
    assert e.area == pytest.approx(math.pi * 1.5, rel=1e-14)
    assert EllipseBody.disk().rotation == 0.0


def test_chord_through_examples(disk, square):
    ch = chord_through(disk, Point(0, 0), Point(0.5, 0))
    assert ch.a == pytest.approx((-1, 0), abs=1e-15) and ch.b == pytest.approx((1, 0), abs=1e-15)
    ch = chord_through(square, Point(0, 0), Point(0.5, 0))
    assert ch.a == pytest.approx((-1, 0), abs=1e-15) and ch.b == pytest.approx((1, 0), abs=1e-15)
    ch = chord_through(disk, Point(0, 0), Point(0.3, 0.4))
    # oracle: roots of |t (0.3, 0.4)|^2 = 1
    roots = np.sort(np.roots([0.25, 0.0, -1.0]))
    assert ch.b == pytest.approx((0.3 * roots[1], 0.4 * roots[1]), abs=1e-12)
    assert ch.a == pytest.approx((0.3 * roots[0], 0.4 * roots[0]), abs=1e-12)
    assert ch.b == pytest.approx((0.6, 0.8), abs=1e-12)


def test_chord_through_errors(disk):
    with pytest.raises(PointsOutside):
        chord_through(disk, Point(0, 0), Point(1.5, 0))
    with pytest.raises(CoincidentPoints):
        chord_through(disk, Point(0.1, 0), Point(0.1, 0))


def test_chord_endpoints_on_boundary_and_ordered():
    rng = np.random.default_rng(3)
    for i in range(2000):
        body = random_ellipse(rng) if i % 2 else random_convex_polygon(rng, n=int(rng.integers(3, 9)))
        p, q = random_interior_point(rng, body), random_interior_point(rng, body)
        a, _, _, b = chord_through(body, p, q)
        if isinstance(body, EllipseBody):
            assert body.level(a) == pytest.approx(1.0, abs=1e-10)
            assert body.level(b) == pytest.approx(1.0, abs=1e-10)
        else:
            assert abs(body.boundary_gap(a)) < 1e-10 and abs(body.boundary_gap(b)) < 1e-10
        assert cross_ratio(a, p, q, b) >= 1.0
        assert math.dist(a, p) < math.dist(a, q)
        assert contains(body, Point((a.x + b.x) / 2, (a.y + b.y) / 2))
        assert not contains(body, a) or body.boundary_gap(a) < 1e-12


def test_inflate_examples(disk):
    big = inflate(disk, 0.21)
    assert big.semi_axes == pytest.approx((1.1, 1.1), rel=1e-15)
    e = EllipseBody.from_axes((0, 0), (2.0, 1.0))
    assert inflate(e, 0.0201).semi_axes == pytest.approx((2.02, 1.01), abs=1e-12)
    assert inflate(e, 1e-12).area == pytest.approx(e.area, rel=1e-11)


def test_inflate_contains_and_scales_area():
    rng = np.random.default_rng(4)
    for _ in range(200):
        e = random_ellipse(rng)
        eps = float(rng.uniform(1e-6, 0.5))
        big = inflate(e, eps)
        assert big.area == pytest.approx((1 + eps) * e.area, rel=1e-12)
        assert big.rotation == pytest.approx(e.rotation, abs=1e-9)
        for _ in range(20):
            p = random_interior_point(rng, e, margin=0.0)
            assert contains(big, p)


def test_boundary_intersections_square_and_disk(square):
    pts = boundary_intersections(EllipseBody.disk(1.05), square)
    # oracle: each edge x=+-1 or y=+-1 meets the circle at +-sqrt(1.05**2 - 1)
    h = math.sqrt(1.05 ** 2 - 1)
    expected = sorted([(s, t * h) for s in (-1, 1) for t in (-1, 1)] + [(t * h, s) for s in (-1, 1) for t in (-1, 1)],
                      key=lambda p: math.atan2(p[1], p[0]))
    assert len(pts) == 8
    for p, q in zip(pts, expected):
        assert p == pytest.approx(q, abs=1e-12)
    assert boundary_intersections(EllipseBody.disk(0.5), square) == []


def test_boundary_intersections_inflated_steiner(unit_triangle):
    e = steiner_inellipse(Triangle(*unit_triangle.vertices))
    pts = boundary_intersections(inflate(e, 1e-3), unit_triangle)
    assert len(pts) == 6
    for p in pts:
        assert inflate(e, 1e-3).level(p) == pytest.approx(1.0, abs=1e-9)
        assert abs(unit_triangle.boundary_gap(p)) < 1e-9


def test_boundary_intersections_reflection_symmetry():
    k = regular_polygon(6)
    e = EllipseBody.from_axes((0, 0), (0.95, 0.9))
    pts = boundary_intersections(e, k)
    assert len(pts) > 0
    for mirror in (lambda p: (p[0], -p[1]), lambda p: (-p[0], p[1])):
        for p in pts:
            assert min(math.dist(mirror(p), q) for q in pts) < 1e-9


def test_boundary_intersections_sorted_by_angle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        k = random_convex_polygon(rng, n=7)
        c = np.mean(np.array(k.vertices), axis=0)
        e = EllipseBody.from_axes(c, (0.6 * k.diameter, 0.2 * k.diameter), rng.uniform(0, 3))
        pts = boundary_intersections(e, k)
        ang = [math.atan2(p.y - e.center.y, p.x - e.center.x) for p in pts]
        assert ang == sorted(ang)


def test_projective_image_of_ellipse_matches_mapped_boundary():
    from hilbert_geom.geometry import apply_projective, random_projective

    rng = np.random.default_rng(6)
    for _ in range(100):
        h = random_projective(rng)
        img = EllipseBody.disk().projective_image(h)
        for th in np.linspace(0, 2 * math.pi, 17):
            p = apply_projective(h, (math.cos(th), math.sin(th)))
            assert img.level(p) == pytest.approx(1.0, abs=1e-9)
