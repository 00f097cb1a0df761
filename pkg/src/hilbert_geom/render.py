"""Standalone SVG figures for CLI reports.

Model coordinates are mapped into a 1000x1000 viewport with a 5% margin and
the y axis pointing up.
"""

from __future__ import annotations

import math
from typing import Any, Iterable

from .errors import SchemaMismatch
from .serialize import REPORT_SCHEMAS, validate

SIZE = 1000.0
MARGIN = 0.05

PREAMBLE = """<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:g}" height="{size:g}" viewBox="0 0 {size:g} {size:g}">
<rect x="0" y="0" width="{size:g}" height="{size:g}" fill="#ffffff"/>
"""


def _ellipse_points(e: dict, n: int = 180) -> list[tuple[float, float]]:
    cx, cy = e["center"]
    a1, a2 = e["semi_axes"]
    t = e.get("rotation_rad", 0.0)
    c, s = math.cos(t), math.sin(t)
    out = []
    for i in range(n):
        th = 2 * math.pi * i / n
        u, v = a1 * math.cos(th), a2 * math.sin(th)
        out.append((cx + c * u - s * v, cy + s * u + c * v))
    return out


def _body_points(body: dict) -> list[tuple[float, float]]:
    if body["type"] == "polygon":
        return [tuple(v) for v in body["vertices"]]
    return _ellipse_points(body)


class Canvas:
    def __init__(self, extent: Iterable[tuple[float, float]]):
        pts = list(extent)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        span = max(x1 - x0, y1 - y0) or 1.0
        self.scale = SIZE * (1 - 2 * MARGIN) / span
        # centre the drawing inside the margins
        self.ox = SIZE * MARGIN + 0.5 * (SIZE * (1 - 2 * MARGIN) - self.scale * (x1 - x0)) - self.scale * x0
        self.oy = SIZE * MARGIN + 0.5 * (SIZE * (1 - 2 * MARGIN) - self.scale * (y1 - y0)) + self.scale * y1
        self.items: list[str] = []

    def xy(self, p) -> tuple[float, float]:
        return self.ox + self.scale * p[0], self.oy - self.scale * p[1]

    def _path(self, pts, closed):
        coords = " ".join("%.3f,%.3f" % self.xy(p) for p in pts)
        return coords + (" z" if closed else "")

    def polygon(self, pts, stroke="#000000", width=2.0, fill="none", dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<polygon points="{self._path(pts, False)}" fill="{fill}" '
                          f'stroke="{stroke}" stroke-width="{width:g}"{d}/>')

    def segment(self, p, q, stroke="#000000", width=1.5, dash=None):
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                          f'stroke="{stroke}" stroke-width="{width:g}"{d}/>')

    def dot(self, p, label=None, color="#000000", r=4.0):
        x, y = self.xy(p)
        self.items.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r:g}" fill="{color}"/>')
        if label:
            self.items.append(f'<text x="{x + 7:.3f}" y="{y - 7:.3f}" font-family="serif" '
                              f'font-size="22" fill="{color}">{label}</text>')

    def svg(self) -> str:
        return PREAMBLE.format(size=SIZE) + "\n".join(self.items) + "\n</svg>\n"


def _draw_body(cv: Canvas, body: dict) -> None:
    cv.polygon(_body_points(body), stroke="#000000", width=2.5)


def _medians(cv: Canvas, rep: dict) -> None:
    tri, mids = rep["triangle"], rep["midpoints"]
    cv.polygon(tri, stroke="#1f4e9c", width=2)
    for v, m in zip(tri, mids):
        cv.segment(v, m, stroke="#c0392b", width=1.5)
    for name, v in zip("ABC", tri):
        cv.dot(v, name)
    for name, m in zip(("A′", "B′", "C′"), mids):
        cv.dot(m, name, color="#c0392b", r=3)
    for p in rep["pairwise_meets"]:
        cv.dot(p, None, color="#27ae60", r=2.5)


def render(report: dict[str, Any], kind: str | None = None) -> str:
    if not isinstance(report, dict) or "kind" not in report:
        raise SchemaMismatch("report has no 'kind' field")
    kind = kind or report["kind"]
    if report["kind"] != kind:
        raise SchemaMismatch(f"expected a {kind!r} report, got {report['kind']!r}")
    if kind not in REPORT_SCHEMAS:
        raise SchemaMismatch(f"no figure for report kind {kind!r}")
    validate(report, REPORT_SCHEMAS[kind])

    body = report["body"]
    extent = list(_body_points(body))
    for key in ("ellipse", "inflated", "ellipse_E", "john_ellipse"):
        if key in report:
            extent += _ellipse_points(report[key])
    cv = Canvas(extent)
    _draw_body(cv, body)

    if kind in ("distance", "midpoint"):
        if "a" in report and "b" in report:
            cv.segment(report["a"], report["b"], stroke="#1f4e9c")
            cv.dot(report["a"], "a")
            cv.dot(report["b"], "b")
        cv.dot(report["p"], "x" if kind == "distance" else "p", color="#c0392b")
        cv.dot(report["q"], "y" if kind == "distance" else "q", color="#c0392b")
        if kind == "midpoint":
            cv.dot(report["midpoint"], "m", color="#27ae60")
    elif kind == "medians":
        _medians(cv, report)
    elif kind == "john":
        cv.polygon(_ellipse_points(report["ellipse"]), stroke="#1f4e9c", width=2)
        for c in report["contacts"]:
            cv.dot(c["point"], None, color="#c0392b")
    elif kind == "inflate":
        cv.polygon(_ellipse_points(report["ellipse"]), stroke="#1f4e9c", width=2)
        cv.polygon(_ellipse_points(report["inflated"]), stroke="#1f4e9c", width=1.5, dash="8,5")
        cv.dot(report["ellipse"]["center"], "E", color="#1f4e9c", r=2)
        for p in report["intersections"]:
            cv.dot(p, None, color="#c0392b")
    elif kind == "witness":
        if "john_ellipse" in report and report["eps_used"] > 0:
            cv.polygon(_ellipse_points(report["john_ellipse"]), stroke="#7f8c8d", width=1, dash="4,4")
        cv.polygon(_ellipse_points(report["ellipse_E"]), stroke="#1f4e9c", width=2)
        f = report["five_points"]
        cv.segment(f["p1"], f["p3"], stroke="#555555")
        cv.segment(f["p2"], f["p4"], stroke="#555555")
        cv.segment(f["p5"], report["q_prime"], stroke="#555555")
        cv.polygon([report["A"], report["B"], report["C"]], stroke="#c0392b", width=2.5)
        for i, sub in enumerate("₁₂₃₄₅", start=1):
            cv.dot(f[f"p{i}"], "p" + sub)
        cv.dot(report["u"], "u", color="#27ae60")
        for name in ("A", "B", "C"):
            cv.dot(report[name], name, color="#c0392b")
        cv.dot(report["q"], "q", color="#1f4e9c")
        cv.dot(report["q_prime"], "q′", color="#000000")
    elif kind == "scan":
        tri = report.get("refined_triangle") or report["triangle"]
        cv.polygon(tri, stroke="#c0392b", width=2)
        for name, v in zip("ABC", tri):
            cv.dot(v, name, color="#c0392b")
    return cv.svg()
