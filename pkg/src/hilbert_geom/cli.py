"""Command-line entry point: ``hilbert-geom <command> --body body.json ...``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.  Errors print a
single ``error=<Token> <message>`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .bodies import Polygon, boundary_intersections, chord_through, inflate
from .errors import HilbertError, NumericalError, SchemaMismatch, ValidationError
from .geometry import Point
from .john import max_area_inscribed_ellipse
from .metric import Triangle, distance, median_report, midpoint
from .render import render
from .serialize import (
    body_to_json,
    dumps,
    ellipse_to_json,
    john_to_json,
    load_body,
    median_report_to_json,
    witness_to_json,
)
from .witness import defect_scan, refine, witness, working_ellipse

COMMANDS = ("dist", "midpoint", "medians", "john", "inflate", "witness", "scan", "render")
DEFAULT_TOL = 1e-9
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


@dataclass
class RunConfig:
    command: str
    body_path: str | None = None
    seed: int = 0
    tol: float = DEFAULT_TOL
    output: str | None = None
    format: str = "json"
    options: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if not (0.0 < self.tol <= 1e-3):
            raise ValidationError(f"tol must lie in (0, 1e-3], got {self.tol}")
        if self.seed < 0:
            raise ValidationError(f"seed must be nonnegative, got {self.seed}")
        if self.format not in ("json", "svg"):
            raise ValidationError(f"unknown format {self.format!r}")


def _point(text: str) -> Point:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"expected a point as 'x,y', got {text!r}") from exc
    return Point.of((x, y))


def _need(cfg: RunConfig, *names: str) -> list[Any]:
    missing = [n for n in names if cfg.options.get(n) is None]
    if missing:
        raise ValidationError(f"{cfg.command} needs --{', --'.join(missing)}")
    return [cfg.options[n] for n in names]


def _execute(cfg: RunConfig) -> dict:
    if cfg.command == "render":
        (path,) = _need(cfg, "report")
        try:
            return json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: {exc}") from exc

    if cfg.body_path is None:
        raise ValidationError(f"{cfg.command} needs --body")
    body = load_body(cfg.body_path)
    bj = body_to_json(body)

    if cfg.command in ("dist", "midpoint"):
        p, q = (_point(v) for v in _need(cfg, "p", "q"))
        out: dict[str, Any] = {"kind": "distance" if cfg.command == "dist" else "midpoint",
                               "body": bj, "p": list(p), "q": list(q)}
        if p != q:
            ch = chord_through(body, p, q)
            out["a"], out["b"] = list(ch.a), list(ch.b)
        if cfg.command == "dist":
            out["distance"] = distance(body, p, q)
        else:
            out["midpoint"] = list(midpoint(body, p, q))
        return out

    if cfg.command == "medians":
        tri = Triangle(*(_point(v) for v in _need(cfg, "a", "b", "c")))
        return median_report_to_json(body, tri, median_report(body, tri))

    if cfg.command in ("john", "inflate") and not isinstance(body, Polygon):
        raise ValidationError(f"{cfg.command} needs a polygon body")

    if cfg.command == "john":
        res = max_area_inscribed_ellipse(body, cfg.tol).require_converged()
        return john_to_json(body, res)

    if cfg.command == "inflate":
        res = max_area_inscribed_ellipse(body, cfg.tol).require_converged()
        eps = cfg.options.get("eps")
        if eps is None:
            inflated, pts, eps = working_ellipse(body, 5, cfg.tol)
            if eps == 0.0:
                raise ValidationError("the inscribed ellipse already has 5 contacts; pass --eps")
        else:
            inflated = inflate(res.ellipse, eps)
            pts = boundary_intersections(inflated, body)
        return {"kind": "inflate", "body": bj, "ellipse": ellipse_to_json(res.ellipse),
                "inflated": ellipse_to_json(inflated), "eps": eps,
                "intersections": [list(p) for p in pts]}

    if cfg.command == "witness":
        return witness_to_json(witness(body, cfg.seed, cfg.tol))

    # scan
    samples = int(cfg.options.get("samples") or 1000)
    tri, d = defect_scan(body, samples, cfg.seed, workers=int(cfg.options.get("workers") or 1))
    out = {"kind": "scan", "body": bj, "samples": samples, "seed": cfg.seed,
           "triangle": [list(p) for p in tri], "defect": d}
    iters = int(cfg.options.get("refine") or 0)
    if iters > 0:
        rt, rd = refine(body, tri, iters)
        out["refined_triangle"] = [list(p) for p in rt]
        out["refined_defect"] = rd
    return out


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        report = _execute(cfg)
        fmt = "svg" if cfg.command == "render" else cfg.format
        text = render(report) if fmt == "svg" else dumps(report)
        if cfg.output and cfg.output != "-":
            Path(cfg.output).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except NumericalError as exc:
        print(f"error={exc.token} {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except HilbertError as exc:
        print(f"error={exc.token} {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error=FileError {exc}", file=sys.stderr)
        return EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilbert-geom",
                                 description="Hilbert-metric medians on planar convex bodies.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", dest="body_path", help="body JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None,
                        help="solver tolerance (default $HILBERT_TOL or 1e-9)")
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "svg"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("dist", "midpoint"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--p", required=True, help="x,y (use --p=-1,0 for negatives)")
        sp.add_argument("--q", required=True)
    sp = sub.add_parser("medians", parents=[common])
    for v in ("a", "b", "c"):
        sp.add_argument(f"--{v}", required=True, help="triangle vertex x,y")
    sub.add_parser("john", parents=[common])
    sp = sub.add_parser("inflate", parents=[common])
    sp.add_argument("--eps", type=float, default=None, help="default: searched as in witness")
    sub.add_parser("witness", parents=[common])
    sp = sub.add_parser("scan", parents=[common])
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--refine", type=int, default=0, help="Nelder-Mead iterations on the winner")
    sp.add_argument("--workers", type=int, default=1)
    sp = sub.add_parser("render", parents=[common])
    sp.add_argument("--report", required=True, help="JSON report written by another command")
    return ap


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    tol = ns.pop("tol")
    if tol is None:
        env = os.environ.get("HILBERT_TOL")
        try:
            tol = float(env) if env else DEFAULT_TOL
        except ValueError:
            raise ValidationError(f"HILBERT_TOL is not a number: {env!r}") from None
    return RunConfig(command=ns.pop("command"), body_path=ns.pop("body_path"), seed=ns.pop("seed"),
                     tol=tol, output=ns.pop("output"), format=ns.pop("format"), options=ns)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except ValidationError as exc:
        print(f"error={exc.token} {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
