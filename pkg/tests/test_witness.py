import math
from itertools import combinations

import numpy as np
import pytest
from conftest import random_convex_polygon, regular_polygon

from hilbert_geom import (
    EllipseBody,
    Point,
    Triangle,
    construct_triangle,
    defect_scan,
    median_report,
    pick_u,
    refine,
    select_five,
    witness,
    working_ellipse,
)
from hilbert_geom.errors import CollinearInputs, NoExteriorRegion, OrderViolation, TooFewPoints
from hilbert_geom.witness import FivePoints, chord_crossing, mirrored


def _on_circle(*angles):
    return [Point(math.cos(a), math.sin(a)) for a in angles]


def test_working_ellipse_examples(square, unit_triangle):
    e, pts, eps = working_ellipse(square)
    assert (len(pts), eps) == (8, 0.1)
    assert e.semi_axes == pytest.approx((math.sqrt(1.1),) * 2, rel=1e-9)
    e, pts, eps = working_ellipse(unit_triangle)
    assert (len(pts), eps) == (6, 0.1)
    e, pts, eps = working_ellipse(regular_polygon(5))
    assert (len(pts), eps) == (5, 0.0)


def test_select_five_matches_brute_force():
    pts = _on_circle(*np.sort(np.random.default_rng(31).uniform(-math.pi, math.pi, 8)))

    def min_gap(idx):
        a = sorted(math.atan2(pts[i].y, pts[i].x) for i in idx)
        return min(np.diff(a + [a[0] + 2 * math.pi]))

    best = max(min_gap(c) for c in combinations(range(8), 5))
    f = select_five(pts, (0.0, 0.0))
    assert min_gap(f.indices) == pytest.approx(best, abs=1e-15)
    # labels p1, p2, p5, p3, p4 follow the input (counterclockwise) order
    i = f.indices
    assert [f.p1, f.p2, f.p5, f.p3, f.p4] == [pts[j] for j in i]
    assert sum(b < a for a, b in zip(i, i[1:] + i[:1])) == 1


def test_select_five_skips_near_duplicates():
    base = list(np.linspace(-math.pi, math.pi, 6)[:-1])
    pts = _on_circle(*sorted(base + [base[2] + 1e-9]))
    f = select_five(pts, (0.0, 0.0))
    chosen = {round(math.atan2(p.y, p.x), 6) for p in f[:5]}
    assert len(chosen) == 5


def test_select_five_rotation_and_errors():
    pts = _on_circle(*np.linspace(-3, 3, 7))
    f0, f1 = select_five(pts, (0, 0)), select_five(pts, (0, 0), rotation=1)
    assert f1.indices == f0.indices[1:] + f0.indices[:1]
    with pytest.raises(TooFewPoints):
        select_five(pts[:4])


def test_mirrored_relabels():
    f = select_five(_on_circle(*np.linspace(-3, 3, 5)), (0, 0))
    g = mirrored(f)
    assert (g.p1, g.p2, g.p3, g.p4, g.p5) == (f.p4, f.p3, f.p2, f.p1, f.p5)
    assert mirrored(g)[:5] == f[:5]


def _square_corner_setup():
    e = EllipseBody.disk(1.05)
    h = math.sqrt(1.05 ** 2 - 1)
    return e, Point(h, 1.0), Point(1.0, h), Point(-1.0, -h)


def test_pick_u_lands_in_corner(square):
    e, p1, p4, p5 = _square_corner_setup()
    for seed in range(10):
        u = pick_u(square, e, p1, p4, p5, avoid=Point(0.2, -0.7), rng_seed=seed)
        assert square.contains(u) and e.level(u) > 1.0
        # beyond the chord p4p1, on the side away from p5
        assert u.x + u.y > p1.x + p1.y


def test_pick_u_no_exterior_region(disk):
    p1, p4, p5 = _on_circle(0.5, -0.5, math.pi)
    with pytest.raises(NoExteriorRegion):
        pick_u(disk, disk, p1, p4, p5, avoid=Point(0, 0))


def test_pick_u_avoidance_takes_next_sample(square):
    e, p1, p4, p5 = _square_corner_setup()
    far = Point(0.123, -0.456)
    u0 = pick_u(square, e, p1, p4, p5, far)
    u1 = pick_u(square, e, p1, p4, p5, far, skip=1)
    on_line = p5 + (u0 - p5) * 0.5
    assert pick_u(square, e, p1, p4, p5, on_line) == u1
    assert u0 != u1


def _symmetric_five(alpha=0.9, beta=2.5):
    p1, p2, p5, p3, p4 = _on_circle(math.pi - beta, math.pi - alpha, math.pi, math.pi + alpha, math.pi + beta)
    return FivePoints(p1, p2, p3, p4, p5)


def test_chord_crossing_on_symmetry_axis():
    f = _symmetric_five()
    A = chord_crossing(f)
    assert A.y == pytest.approx(0.0, abs=1e-15)
    # oracle: the chord p1p3 meets the x-axis where its y-coordinate vanishes
    t = f.p1.y / (f.p1.y - f.p3.y)
    assert A.x == pytest.approx(f.p1.x + t * (f.p3.x - f.p1.x), abs=1e-14)
    with pytest.raises(CollinearInputs):
        construct_triangle(f, Point(0.9, 0.0))


def test_chord_crossing_rejects_collinear_points():
    f = FivePoints(Point(0, 0), Point(1, 0), Point(2, 0), Point(1, 1), Point(0, 1))
    with pytest.raises(CollinearInputs):
        chord_crossing(f)


def test_construct_triangle_generic():
    f = _symmetric_five()
    u = Point(0.95, 0.1)
    try:
        tri, g = construct_triangle(f, u), f
    except OrderViolation:
        g = mirrored(f)
        tri = construct_triangle(g, u)
    A, B, C = tri
    area = lambda a, b, c: (b - a).cross(c - a)
    assert abs(area(g.p1, g.p3, B)) < 1e-12 and abs(area(g.p2, g.p4, C)) < 1e-12
    assert abs(area(g.p5, u, B)) < 1e-12 and abs(area(g.p5, u, C)) < 1e-12
    assert math.dist(g.p5, C) < math.dist(g.p5, B)
    with pytest.raises(OrderViolation):
        construct_triangle(mirrored(g), u)


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_witness_square(square, seed):
    w = witness(square, seed)
    assert 1.0 < w.b < w.x < w.x_prime
    assert w.m_prime < w.m
    assert w.defect > 0.0
    assert w.defect_under_E < 1e-8
    assert w.chart_residual < 1e-9
    assert w.shared_midpoint_gap < 1e-9
    assert median_report(square, w.triangle).defect == w.defect
    for p in w.triangle:
        assert square.contains(p) and w.ellipse_E.contains(p)


def test_witness_triangle_and_pentagon(unit_triangle):
    w = witness(unit_triangle, 7)
    assert w.x < w.x_prime and w.defect > 1e-3
    w = witness(regular_polygon(5), 7)
    assert w.eps_used == 0.0 and w.x < w.x_prime and w.defect > 0


def test_witness_random_polygons():
    rng = np.random.default_rng(32)
    for _ in range(5):
        k = random_convex_polygon(rng, n=int(rng.integers(3, 9)))
        w = witness(k, 0)
        assert w.x < w.x_prime and w.m_prime < w.m and w.defect > 0


def test_witness_is_deterministic(square):
    a, b = witness(square, 3), witness(square, 3)
    assert a.triangle == b.triangle and a.defect == b.defect


def test_witness_on_ellipse_has_no_exterior(disk):
    with pytest.raises(NoExteriorRegion):
        witness(disk)


def test_defect_vanishes_as_polygons_approach_the_disk():
    t = Triangle(Point(-0.3, -0.2), Point(0.4, -0.1), Point(0.05, 0.5))
    defects = [median_report(regular_polygon(n), t).defect for n in (8, 32, 128, 512)]
    assert all(a > b for a, b in zip(defects, defects[1:]))
    assert defects[-1] < 1e-6


def test_defect_scan_golden_and_worker_independent(square, disk):
    tri, d = defect_scan(square, 1000, 0)
    assert d == pytest.approx(0.18920247077513871, rel=1e-9)
    assert median_report(square, tri).defect == d
    assert defect_scan(square, 200, 5, workers=2) == defect_scan(square, 200, 5)
    assert defect_scan(disk, 300, 0)[1] < 1e-8


def test_refine_never_decreases(square):
    for seed in range(3):
        tri, d = defect_scan(square, 20, seed)
        rt, rd = refine(square, tri, 100)
        assert rd >= d
        assert rd == pytest.approx(median_report(square, rt).defect, rel=1e-12)
        for p in rt:
            assert square.boundary_gap(p) > 0
    tri, d = defect_scan(square, 5, 9)
    assert refine(square, tri, 0) == (tri, d)


def test_refine_stays_tiny_on_ellipse():
    e = EllipseBody.from_axes((0.5, -1), (2.0, 0.7), 0.3)
    tri, d = defect_scan(e, 50, 0)
    _, rd = refine(e, tri, 150)
    assert rd < 1e-8


def test_select_five_greedy_matches_brute_force():
    from hilbert_geom.witness import _max_spread, _min_gap

    rng = np.random.default_rng(34)
    for n in (25, 27):
        a = list(np.sort(rng.uniform(-math.pi, math.pi, n)))
        best = max(_min_gap([a[i] for i in c]) for c in combinations(range(n), 5))
        assert _min_gap([a[i] for i in _max_spread(a)]) == pytest.approx(best, abs=1e-12)


def test_witness_defect_shrinks_toward_the_disk():
    defects = [witness(regular_polygon(n), 0).defect for n in (64, 256, 1024)]
    assert all(d > 0 for d in defects)
    assert defects[0] > defects[1] > defects[2]


def test_single_sample_scan(square):
    from hilbert_geom.witness import sample_triangles

    tri, d = defect_scan(square, 1, 3)
    assert tri == sample_triangles(square, 1, 3)[0]
    assert d == median_report(square, tri).defect == pytest.approx(0.01031491698470439, rel=1e-12)
