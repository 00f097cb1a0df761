"""Constructive non-concurrence witnesses for non-ellipse bodies.

The pipeline runs the classical argument forward:

1. take the maximal inscribed ellipse E; if it touches the boundary in fewer
   than five points, inflate it slightly so its boundary crosses the polygon
   boundary at least five times;
2. pick five common boundary points, labelled so that their cyclic order is
   p1, p2, p5, p3, p4, and a point u of K outside E between p4 and p1;
3. A = p1p3 & p2p4, B = p5u & p1p3, C = p5u & p2p4.

Edges AB and AC lie on chords whose ends are common to both boundaries, so
their midpoints agree under d_E and d_K.  Edge BC lies on p5u, whose far end is
q on the ellipse but q' (further out) on K, and the midpoint map is strictly
decreasing in the far end.  The K-median from A therefore misses the point
where the other two meet.  Everything that the argument assumes is checked
numerically along the way.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .bodies import ConvexBody, EllipseBody, Polygon, boundary_intersections, inflate, ray_exit
from .errors import (
    AvoidanceFailed,
    CollinearInputs,
    DegenerateWitness,
    HilbertError,
    InflationFailed,
    LineMissesChord,
    NoExteriorRegion,
    OrderViolation,
    PointsOutside,
    TooFewPoints,
)
from .geometry import (
    ChordFrame,
    Point,
    chord_coordinate,
    dist,
    intersect_lines,
    line_through,
    twice_signed_area,
)
from .john import max_area_inscribed_ellipse
from .metric import Triangle, median_report, midpoint, midpoint_line_coords

EPS0 = 0.1
EPS_STEPS = 40
U_TRIES = 1000
X_RETRIES = 50
STRICT_GAP = 1e-9
CHART_TOL = 1e-9
SCAN_MARGIN = 1e-3
# twice-area floor, in units of diameter**2, shared by the scan and the ascent
MIN_AREA2 = 1e-4


class FivePoints(NamedTuple):
    p1: Point
    p2: Point
    p3: Point
    p4: Point
    p5: Point
    indices: tuple[int, ...] = ()


@dataclass
class WitnessReport:
    body: ConvexBody
    ellipse_E: EllipseBody
    eps_used: float
    five_points: FivePoints
    u: Point
    A: Point
    B: Point
    C: Point
    q: Point
    q_prime: Point
    b: float
    x: float
    x_prime: float
    m: float
    m_prime: float
    defect: float
    john_ellipse: EllipseBody | None = None
    defect_under_E: float = math.nan
    chart_residual: float = math.nan
    shared_midpoint_gap: float = math.nan
    attempts: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def triangle(self) -> Triangle:
        return Triangle(self.A, self.B, self.C)

    @property
    def line_coords(self) -> tuple[float, float, float, float, float]:
        return self.b, self.x, self.x_prime, self.m, self.m_prime


# -- working ellipse -----------------------------------------------------------

def working_ellipse(k: Polygon, min_points: int = 5, tol: float = 1e-9):
    """An ellipse meeting ``boundary(k)`` in at least ``min_points`` points.

    Returns ``(ellipse, points, eps)``; ``eps == 0`` means the maximal
    inscribed ellipse already has enough contacts.
    """
    john = max_area_inscribed_ellipse(k, tol).require_converged()
    if len(john.contacts) >= min_points:
        return john.ellipse, [p for p, _ in john.contacts], 0.0
    counts = {}
    for j in range(EPS_STEPS):
        eps = EPS0 * 2.0 ** -j
        e = inflate(john.ellipse, eps)
        pts = boundary_intersections(e, k)
        counts[eps] = len(pts)
        # e contains the inscribed ellipse, so it always has interior points in k
        if len(pts) >= min_points:
            return e, pts, eps
    raise InflationFailed(f"no eps in the grid gives {min_points} crossings; counts per eps: {counts}")


# -- five-point selection ----------------------------------------------------------

def _angles(points: Sequence[Point], center: Sequence[float]) -> list[float]:
    return [math.atan2(p[1] - center[1], p[0] - center[0]) for p in points]


def _min_gap(angles: Sequence[float]) -> float:
    a = sorted(angles)
    gaps = [a[i + 1] - a[i] for i in range(len(a) - 1)]
    gaps.append(a[0] + 2 * math.pi - a[-1])
    return min(gaps)


def _max_spread(angles: list[float], k: int = 5) -> tuple[int, ...]:
    n = len(angles)
    if n <= 24:
        best, best_set = -1.0, None
        for idx in combinations(range(n), k):
            g = _min_gap([angles[i] for i in idx])
            if g > best + 1e-12:
                best, best_set = g, idx
        return best_set
    # too many subsets: binary search the gap, greedy from every start at once
    order = np.argsort(angles, kind="stable")
    th = np.asarray(angles, dtype=float)[order]
    ext = np.concatenate([th, th + 2 * math.pi])
    starts = np.arange(n)

    def greedy(g):
        cur = starts.copy()
        picks = [cur]
        for _ in range(k - 1):
            cur = np.searchsorted(ext, ext[cur] + g)
            cur = np.minimum(cur, 2 * n - 1)
            picks.append(cur)
        ok = (cur < starts + n) & (ext[starts] + 2 * math.pi - ext[cur] >= g)
        for j in range(1, k):
            ok &= ext[picks[j]] - ext[picks[j - 1]] >= g
        hit = np.flatnonzero(ok)
        if hit.size == 0:
            return None
        return [int(p[hit[0]]) % n for p in picks]

    lo, hi = 0.0, 2 * math.pi / k
    found = greedy(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        pick = greedy(mid)
        if pick is None:
            hi = mid
        else:
            lo, found = mid, pick
    return tuple(sorted(int(order[i]) for i in found))


def select_five(points: Sequence[Point], center: Sequence[float] | None = None,
                rotation: int = 0) -> FivePoints:
    """Five of the points with the largest minimum angular gap, labelled in cyclic order.

    ``points`` must already be in angular order around ``center`` (default:
    their centroid).  The chosen points, in that order and starting at offset
    ``rotation``, are labelled p1, p2, p5, p3, p4.
    """
    if len(points) < 5:
        raise TooFewPoints(f"need at least 5 boundary points, got {len(points)}")
    if center is None:
        center = (sum(p[0] for p in points) / len(points), sum(p[1] for p in points) / len(points))
    ang = _angles(points, center)
    idx = _max_spread(ang)
    # cyclic order of the chosen indices follows the input order
    r = [idx[(rotation + j) % 5] for j in range(5)]
    p = [Point(*points[i]) for i in r]
    return FivePoints(p1=p[0], p2=p[1], p5=p[2], p3=p[3], p4=p[4], indices=tuple(r))


def mirrored(f: FivePoints) -> FivePoints:
    """Relabel by reversing the cyclic order; the pattern p1, p2, p5, p3, p4 is kept."""
    i = f.indices
    mi = (i[4], i[3], i[2], i[1], i[0]) if i else ()
    return FivePoints(p1=f.p4, p2=f.p3, p3=f.p2, p4=f.p1, p5=f.p5, indices=mi)


# -- the exterior point u --------------------------------------------------------------

def _sector_samples(k: ConvexBody, e: EllipseBody, p1: Point, p4: Point, p5: Point, rng_seed: int):
    """Candidate u's in K beyond the chord p4p1, outside the closed ellipse.

    Yields ``(u or None)`` per low-discrepancy draw; None marks a draw whose
    normal ray has no K-minus-E part.
    """
    chord = p1 - p4
    nrm = Point(-chord.y, chord.x) * (1.0 / chord.norm())
    if nrm.dot(p5 - p4) > 0:
        nrm = -nrm
    floor = 1e-9 * k.diameter
    halton = qmc.Halton(d=2, scramble=True, seed=rng_seed)
    while True:
        for t, s in halton.random(64):
            c = p4 + chord * t
            try:
                h_k = dist(c, ray_exit(k, c, nrm))
            except PointsOutside:
                yield None
                continue
            _, hi = e.ray_params(c, nrm)
            h_e = max(hi, 0.0) if math.isfinite(hi) else 0.0
            if h_k - h_e <= floor:
                yield None
                continue
            u = c + nrm * (h_e + (0.05 + 0.9 * s) * (h_k - h_e))
            if k.contains(u) and e.level(u) > 1.0 + 1e-12:
                yield u
            else:
                yield None


def _pick_u(k, e, p1, p4, p5, avoid, rng_seed, skip=0):
    need = 1e-6 * k.diameter
    exterior, admissible = 0, 0
    for tries, u in enumerate(_sector_samples(k, e, p1, p4, p5, rng_seed)):
        if tries >= U_TRIES:
            break
        if u is None:
            continue
        exterior += 1
        if abs(line_through(p5, u).signed_distance(avoid)) < need:
            continue
        if admissible == skip:
            return u
        admissible += 1
    if exterior == 0:
        raise NoExteriorRegion("no point of K outside E was found between p4 and p1")
    raise AvoidanceFailed(f"{exterior} exterior samples, none usable after skipping {skip}")


def pick_u(k: ConvexBody, e: EllipseBody, p1: Point, p4: Point, p5: Point,
           avoid: Point, rng_seed: int = 0, skip: int = 0) -> Point:
    """A point of K outside E in the sector cut off by the chord p4p1.

    Candidates come from a scrambled Halton sequence seeded by ``rng_seed``;
    the first one whose line to p5 misses ``avoid`` by at least 1e-6 times the
    diameter is returned (``skip`` discards that many admissible ones first).
    """
    return _pick_u(k, e, p1, p4, p5, avoid, rng_seed, skip)


# -- the triangle ---------------------------------------------------------------

def _chord_param(p: Point, q: Point, x: Point) -> float:
    d = q - p
    return (x - p).dot(d) / d.dot(d)


def chord_crossing(f: FivePoints) -> Point:
    diam = max(dist(a, b) for a, b in combinations(f[:5], 2))
    for a, b, c in combinations(f[:5], 3):
        if abs(twice_signed_area(a, b, c)) <= 1e-9 * diam * diam:
            raise CollinearInputs("three of the five boundary points are collinear")
    return intersect_lines(line_through(f.p1, f.p3), line_through(f.p2, f.p4))


def construct_triangle(f: FivePoints, u: Point) -> Triangle:
    """A = p1p3 & p2p4, B = p5u & p1p3, C = p5u & p2p4, with C nearer to p5."""
    A = chord_crossing(f)
    diam = max(dist(a, b) for a, b in combinations(f[:5], 2))
    l5 = line_through(f.p5, u)
    if abs(l5.signed_distance(A)) < 1e-12 * diam:
        raise CollinearInputs("line p5u passes through A")
    try:
        B = intersect_lines(l5, line_through(f.p1, f.p3))
        C = intersect_lines(l5, line_through(f.p2, f.p4))
    except HilbertError as exc:
        raise LineMissesChord(str(exc)) from exc
    for name, pt, (a, b) in (("B", B, (f.p1, f.p3)), ("C", C, (f.p2, f.p4))):
        s = _chord_param(a, b, pt)
        if not 0.0 < s < 1.0:
            raise LineMissesChord(f"{name} falls outside its chord (parameter {s:.6g})")
    d = u - f.p5
    if (C - f.p5).dot(d) >= (B - f.p5).dot(d):
        raise OrderViolation("line p5u meets p1p3 before p2p4")
    return Triangle(A, B, C)


# -- the full pipeline -------------------------------------------------------------

def _witness_attempt(k, e, f, u):
    tri = construct_triangle(f, u)
    A, B, C = tri
    for p in tri:
        if not (k.contains(p) and e.contains(p)):
            raise PointsOutside(f"triangle vertex {tuple(p)} is not inside both K and E")
    frame = ChordFrame.through(f.p5, u, one=C)
    direction = frame.direction
    q = ray_exit(e, B, direction)
    q_prime = ray_exit(k, B, direction)
    b = chord_coordinate(frame, B)
    x = chord_coordinate(frame, q)
    x_prime = chord_coordinate(frame, q_prime)
    return tri, frame, q, q_prime, b, x, x_prime


def witness(k: ConvexBody, rng_seed: int = 0, tol: float = 1e-9) -> WitnessReport:
    if isinstance(k, EllipseBody):
        # K is its own maximal inscribed ellipse; any five boundary points will do
        e, john, eps = k, k, 0.0
        pts = [k.point_at_angle(2 * math.pi * j / 5) for j in range(5)]
    else:
        john = max_area_inscribed_ellipse(k, tol).require_converged().ellipse
        e, pts, eps = working_ellipse(k, 5, tol)

    failures: list[str] = []
    attempts = 0
    found = None
    exterior_seen = False
    for rotation in range(5):
        f = select_five(pts, e.center, rotation)
        A = chord_crossing(f)
        for retry in range(X_RETRIES):
            attempts += 1
            try:
                u = pick_u(k, e, f.p1, f.p4, f.p5, A, rng_seed, skip=retry)
            except NoExteriorRegion:
                failures.append(f"rotation {rotation}: no exterior region")
                break
            exterior_seen = True
            try:
                try:
                    ff = f
                    parts = _witness_attempt(k, e, ff, u)
                except OrderViolation:
                    ff = mirrored(f)
                    parts = _witness_attempt(k, e, ff, u)
            except (PointsOutside, CollinearInputs, LineMissesChord, OrderViolation) as exc:
                failures.append(f"rotation {rotation} retry {retry}: {exc.token}")
                continue
            if parts[6] - parts[5] > STRICT_GAP:
                found = (ff, u, parts)
                break
            failures.append(f"rotation {rotation} retry {retry}: x' - x = {parts[6] - parts[5]:.3g}")
        if found:
            break
    if found is None:
        if not exterior_seen:
            raise NoExteriorRegion("K minus E is empty along every sector: the body is the ellipse")
        raise DegenerateWitness("no admissible witness; " + "; ".join(failures[-5:]))

    f, u, (tri, frame, q, q_prime, b, x, x_prime) = found
    A, B, C = tri
    m = midpoint_line_coords(1.0, b, x)
    m_prime = midpoint_line_coords(1.0, b, x_prime)
    # chart images of the actual Hilbert midpoints of BC under d_E and d_K
    m_e = chord_coordinate(frame, midpoint(e, B, C), tol=1e-7)
    m_k = chord_coordinate(frame, midpoint(k, B, C), tol=1e-7)
    chart_residual = max(abs(m_e - m), abs(m_k - m_prime))
    if chart_residual > CHART_TOL:
        raise DegenerateWitness(f"chart midpoints disagree with the closed form by {chart_residual:.3g}")
    if not m_prime < m:
        raise DegenerateWitness(f"expected m' < m, got m={m!r}, m'={m_prime!r}")
    shared = max(dist(midpoint(e, A, C), midpoint(k, A, C)),
                 dist(midpoint(e, A, B), midpoint(k, A, B))) / tri.diameter
    report_k = median_report(k, tri)
    report_e = median_report(e, tri)
    if not report_k.defect > 0.0:
        raise DegenerateWitness("median defect under d_K vanished")
    return WitnessReport(
        body=k, ellipse_E=e, eps_used=eps, five_points=f, u=u, A=A, B=B, C=C,
        q=q, q_prime=q_prime, b=b, x=x, x_prime=x_prime, m=m, m_prime=m_prime,
        defect=report_k.defect, john_ellipse=john, defect_under_E=report_e.defect,
        chart_residual=chart_residual, shared_midpoint_gap=shared, attempts=attempts,
        diagnostics={"failures": failures})


# -- randomized scan and local ascent ------------------------------------------

def _gaps(body: ConvexBody, pts: np.ndarray) -> np.ndarray:
    if isinstance(body, Polygon):
        n = np.array(body.normals)
        c = np.array(body.offsets)
        return np.min(c[None, :] - pts @ n.T, axis=1)
    inv = np.linalg.inv(np.asarray(body.shape))
    u = (pts - np.asarray(body.center)) @ inv.T
    return (1.0 - np.linalg.norm(u, axis=1)) * body.semi_axes[1]


def sample_triangles(body: ConvexBody, samples: int, rng_seed: int,
                     margin: float = SCAN_MARGIN) -> list[Triangle]:
    """``samples`` triangles with vertices uniform in the body shrunk by ``margin * diameter``."""
    rng = np.random.default_rng(rng_seed)
    diam = body.diameter
    x0, y0, x1, y1 = body.bounding_box()
    lo, span = np.array([x0, y0]), np.array([x1 - x0, y1 - y0])
    min_area2 = MIN_AREA2 * diam * diam
    out: list[Triangle] = []
    while len(out) < samples:
        batch = lo + span * rng.random((4 * 3 * (samples - len(out)) + 30, 2))
        batch = batch[_gaps(body, batch) > margin * diam]
        for i in range(0, len(batch) - 2, 3):
            a, b, c = batch[i], batch[i + 1], batch[i + 2]
            if abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) < min_area2:
                continue
            out.append(Triangle(Point(float(a[0]), float(a[1])), Point(float(b[0]), float(b[1])),
                                Point(float(c[0]), float(c[1]))))
            if len(out) == samples:
                break
    return out


def _defects(body: ConvexBody, tris: list[Triangle]) -> list[float]:
    return [median_report(body, t).defect for t in tris]


def defect_scan(body: ConvexBody, samples: int, rng_seed: int = 0,
                workers: int = 1) -> tuple[Triangle, float]:
    """Largest median defect over ``samples`` random triangles (first one wins ties).

    All triangles are drawn up front from one seeded stream, so the result does
    not depend on ``workers``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    tris = sample_triangles(body, samples, rng_seed)
    if workers > 1:
        chunks = [tris[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_defects, [body] * workers, chunks))
        defects = [0.0] * len(tris)
        for w, part in enumerate(parts):
            defects[w::workers] = part
    else:
        defects = _defects(body, tris)
    best = int(np.argmax(defects))
    return tris[best], defects[best]


def _project_inside(body: ConvexBody, p: np.ndarray, margin: float) -> np.ndarray:
    """Pull ``p`` toward the body's centre until it is ``margin`` inside."""
    if _gaps(body, p[None, :])[0] >= margin:
        return p
    if isinstance(body, Polygon):
        c0 = np.mean(np.array(body.vertices), axis=0)
    else:
        c0 = np.asarray(body.center)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _gaps(body, (c0 + mid * (p - c0))[None, :])[0] >= margin:
            lo = mid
        else:
            hi = mid
    return c0 + lo * (p - c0)


def refine(body: ConvexBody, t: Triangle, iters: int = 200) -> tuple[Triangle, float]:
    """Nelder-Mead ascent of the defect over the six vertex coordinates.

    Trial vertices are projected back inside the body; the returned defect is
    never below the starting one.
    """
    t = Triangle(*(Point(*p) for p in t))
    start = median_report(body, t).defect
    if iters <= 0:
        return t, start
    margin = SCAN_MARGIN * body.diameter
    min_area2 = MIN_AREA2 * body.diameter ** 2

    def admissible(tri):
        return abs(twice_signed_area(*tri)) >= min_area2

    def to_triangle(z):
        pts = [_project_inside(body, np.array(z[2 * i:2 * i + 2]), margin) for i in range(3)]
        return Triangle(*(Point(float(p[0]), float(p[1])) for p in pts))

    def objective(z):
        tri = to_triangle(z)
        if not admissible(tri):
            return 0.0
        try:
            return -median_report(body, tri).defect
        except HilbertError:
            return 0.0

    z0 = np.array([c for p in t for c in p])
    step = 0.05 * body.diameter
    simplex = np.vstack([z0] + [z0 + step * np.eye(6)[i] for i in range(6)])
    res = minimize(objective, z0, method="Nelder-Mead",
                   options={"maxiter": iters, "initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-14})
    cand = to_triangle(res.x)
    if not admissible(cand):
        return t, start
    try:
        val = median_report(body, cand).defect
    except HilbertError:
        return t, start
    return (cand, val) if val > start else (t, start)
