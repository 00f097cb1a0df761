"""JSON schemas, body parsing and report serialization.

Floats are written with 17 significant digits so that reports round-trip
bit-exactly and identical runs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import jsonschema

from .bodies import ConvexBody, EllipseBody, Polygon
from .errors import SchemaMismatch
from .john import JohnResult
from .metric import MedianReport, Triangle
from .witness import WitnessReport

_num = {"type": "number"}
_pt = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_nullable_num = {"type": ["number", "null"]}

ELLIPSE_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"const": "ellipse"},
        "center": _pt,
        "semi_axes": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                      "minItems": 2, "maxItems": 2},
        "rotation_rad": _num,
    },
    "required": ["type", "center", "semi_axes"],
}

POLYGON_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"const": "polygon"},
        "vertices": {"type": "array", "items": _pt, "minItems": 3},
    },
    "required": ["type", "vertices"],
}

BODY_SCHEMA = {"oneOf": [POLYGON_SCHEMA, ELLIPSE_SCHEMA]}


def _report(kind: str, props: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "properties": {"kind": {"const": kind}, "body": BODY_SCHEMA, **props},
        "required": ["kind", "body", *required],
    }


_line = {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}
_triangle = {"type": "array", "items": _pt, "minItems": 3, "maxItems": 3}
_median_props = {
    "triangle": _triangle,
    "midpoints": _triangle,
    "medians": {"type": "array", "items": _line, "minItems": 3, "maxItems": 3},
    "pairwise_meets": _triangle,
    "defect": {"type": "number", "minimum": 0},
}

REPORT_SCHEMAS = {
    "distance": _report("distance", {"p": _pt, "q": _pt, "a": _pt, "b": _pt,
                                     "distance": {"type": "number", "minimum": 0}},
                        ["p", "q", "distance"]),
    "midpoint": _report("midpoint", {"p": _pt, "q": _pt, "a": _pt, "b": _pt, "midpoint": _pt},
                        ["p", "q", "midpoint"]),
    "medians": _report("medians", _median_props, list(_median_props)),
    "john": _report("john", {
        "ellipse": ELLIPSE_SCHEMA,
        "contacts": {"type": "array", "items": {
            "type": "object",
            "properties": {"point": _pt, "edge_index": {"type": "integer", "minimum": 0}},
            "required": ["point", "edge_index"]}},
        "objective": _num, "kkt_residual": {"type": "number", "minimum": 0},
        "iterations": {"type": "integer"}, "converged": {"type": "boolean"},
    }, ["ellipse", "contacts", "objective", "kkt_residual", "iterations"]),
    "inflate": _report("inflate", {
        "ellipse": ELLIPSE_SCHEMA, "inflated": ELLIPSE_SCHEMA,
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "intersections": {"type": "array", "items": _pt},
    }, ["ellipse", "inflated", "eps", "intersections"]),
    "witness": _report("witness", {
        "ellipse_E": ELLIPSE_SCHEMA, "john_ellipse": ELLIPSE_SCHEMA,
        "eps_used": {"type": "number", "minimum": 0},
        "five_points": {"type": "object", "properties": {k: _pt for k in ("p1", "p2", "p3", "p4", "p5")},
                        "required": ["p1", "p2", "p3", "p4", "p5"]},
        **{k: _pt for k in ("u", "A", "B", "C", "q", "q_prime")},
        **{k: _num for k in ("b", "x", "x_prime", "m", "m_prime")},
        "defect": {"type": "number", "exclusiveMinimum": 0},
        "defect_under_E": _num, "chart_residual": _num, "shared_midpoint_gap": _num,
    }, ["ellipse_E", "eps_used", "five_points", "u", "A", "B", "C", "q", "q_prime",
        "b", "x", "x_prime", "m", "m_prime", "defect"]),
    "scan": _report("scan", {"samples": {"type": "integer", "minimum": 1}, "seed": {"type": "integer"},
                             "triangle": _triangle, "defect": {"type": "number", "minimum": 0},
                             "refined_triangle": _triangle, "refined_defect": _nullable_num},
                    ["samples", "triangle", "defect"]),
}


def validate(obj: Any, schema: dict) -> None:
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaMismatch(exc.message) from exc


# -- bodies -------------------------------------------------------------------

def ellipse_to_json(e: EllipseBody) -> dict:
    return {"type": "ellipse", "center": list(e.center), "semi_axes": list(e.semi_axes),
            "rotation_rad": e.rotation}


def body_to_json(body: ConvexBody) -> dict:
    if isinstance(body, Polygon):
        return {"type": "polygon", "vertices": [list(v) for v in body.vertices]}
    return ellipse_to_json(body)


def body_from_json(obj: Any) -> ConvexBody:
    validate(obj, BODY_SCHEMA)
    if obj["type"] == "polygon":
        return Polygon(obj["vertices"])
    return EllipseBody.from_axes(obj["center"], obj["semi_axes"], obj.get("rotation_rad", 0.0))


def load_body(path: str | Path) -> ConvexBody:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: {exc}") from exc
    return body_from_json(obj)


# -- reports -------------------------------------------------------------------

def _pts(ps) -> list[list[float]]:
    return [list(p) for p in ps]


def median_report_to_json(body: ConvexBody, t: Triangle, r: MedianReport) -> dict:
    return {"kind": "medians", "body": body_to_json(body), "triangle": _pts(t),
            "midpoints": _pts(r.midpoints), "medians": _pts(r.medians),
            "pairwise_meets": _pts(r.pairwise_meets), "defect": r.defect}


def john_to_json(body: Polygon, r: JohnResult) -> dict:
    return {"kind": "john", "body": body_to_json(body), "ellipse": ellipse_to_json(r.ellipse),
            "contacts": [{"point": list(p), "edge_index": i} for p, i in r.contacts],
            "objective": r.objective, "kkt_residual": r.kkt_residual,
            "iterations": r.iterations, "converged": r.converged, "audit_passed": r.audit_passed}


def witness_to_json(r: WitnessReport) -> dict:
    f = r.five_points
    out = {"kind": "witness", "body": body_to_json(r.body), "ellipse_E": ellipse_to_json(r.ellipse_E),
           "eps_used": r.eps_used,
           "five_points": {"p1": list(f.p1), "p2": list(f.p2), "p3": list(f.p3),
                           "p4": list(f.p4), "p5": list(f.p5)},
           "u": list(r.u), "A": list(r.A), "B": list(r.B), "C": list(r.C),
           "q": list(r.q), "q_prime": list(r.q_prime),
           "b": r.b, "x": r.x, "x_prime": r.x_prime, "m": r.m, "m_prime": r.m_prime,
           "defect": r.defect, "defect_under_E": r.defect_under_E,
           "chart_residual": r.chart_residual, "shared_midpoint_gap": r.shared_midpoint_gap,
           "attempts": r.attempts}
    if r.john_ellipse is not None:
        out["john_ellipse"] = ellipse_to_json(r.john_ellipse)
    return out


def _fmt(x: Any) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return "null"
        s = format(x, ".17g")
        # keep floats recognisably floats
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if hasattr(x, "item"):
        return _fmt(x.item())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj: Any) -> str:
    return _fmt(obj) + "\n"
