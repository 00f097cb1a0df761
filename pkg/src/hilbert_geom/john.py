"""Maximal-area inscribed ellipse of a convex polygon.

The ellipse ``{d + B u : |u| <= 1}`` lies in the half-plane ``n.x <= c`` iff
``|B n| + n.d <= c``, a second-order-cone constraint in ``(d, B)``.  We
maximize ``log det B`` with a log barrier on ``(c - n.d)**2 - |B n|**2`` and
damped Newton centering, over the five unknowns ``(d1, d2, b11, b12, b22)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .bodies import EllipseBody, Polygon
from .errors import DegeneratePolygon, DegenerateTriangle, NoConvergence, ValidationError
from .geometry import Point, twice_signed_area
from .metric import Triangle

MAX_ITER = 500
AUDIT_SAMPLES = 200


@dataclass
class JohnResult:
    ellipse: EllipseBody
    contacts: list[tuple[Point, int]]
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool = True
    audit_passed: bool | None = None
    slacks: np.ndarray = field(default=None, repr=False)

    def require_converged(self) -> "JohnResult":
        if not self.converged:
            raise NoConvergence(
                f"inscribed-ellipse solve stopped after {self.iterations} Newton steps "
                f"(kkt residual {self.kkt_residual:.3g})")
        return self


def _unpack(x):
    return x[:2], np.array([[x[2], x[3]], [x[3], x[4]]])


def _edge_data(k: Polygon):
    n = np.array(k.normals)
    c = np.array(k.offsets)
    return n, c


def _slacks(x, n, c):
    d, b = _unpack(x)
    return c - n @ d - np.linalg.norm(n @ b, axis=1)


def _barrier_terms(x, n, c, t):
    """Value, gradient and Hessian of ``-t log det B - sum log g_i``; None outside the domain."""
    d, b = _unpack(x)
    det = x[2] * x[4] - x[3] * x[3]
    s = c - n @ d                   # (m,)
    v = n @ b                        # (m, 2) rows are B n_i
    g = s * s - np.einsum("ij,ij->i", v, v)
    if det <= 0.0 or x[2] <= 0.0 or np.any(s <= 0.0) or np.any(g <= 0.0):
        return None
    m = len(c)
    # s_i = c_i - n_i.d  ->  ds/dx = (-n_i, 0, 0, 0)
    # v_i = V_i x with V_i = [[0, 0, n1, n2, 0], [0, 0, 0, n1, n2]]
    V = np.zeros((m, 2, 5))
    V[:, 0, 2] = n[:, 0]
    V[:, 0, 3] = n[:, 1]
    V[:, 1, 3] = n[:, 0]
    V[:, 1, 4] = n[:, 1]
    a = np.zeros((m, 5))
    a[:, :2] = -n
    grad_g = 2.0 * s[:, None] * a - 2.0 * np.einsum("ikj,ik->ij", V, v)
    hess_g = 2.0 * np.einsum("ij,ik->ijk", a, a) - 2.0 * np.einsum("ilj,ilk->ijk", V, V)

    val = -t * math.log(det) - float(np.sum(np.log(g)))
    dd = np.array([0.0, 0.0, x[4], -2.0 * x[3], x[2]])
    d2d = np.zeros((5, 5))
    d2d[2, 4] = d2d[4, 2] = 1.0
    d2d[3, 3] = -2.0
    grad = -t * dd / det - np.sum(grad_g / g[:, None], axis=0)
    hess = t * (np.outer(dd, dd) / det ** 2 - d2d / det)
    hess += np.einsum("ij,ik->jk", grad_g / g[:, None], grad_g / g[:, None])
    hess -= np.einsum("ijk,i->jk", hess_g, 1.0 / g)
    return val, grad, hess


def _kkt_residual(x, n, c, active=1e-6):
    """KKT residual of ``min -log det B  s.t.  h_i = c_i - n_i.d - |B n_i| >= 0``.

    Multipliers on the near-active constraints come from nonnegative least
    squares; the residual is the worst of stationarity, complementarity and
    primal infeasibility.  (Barrier multipliers are useless here: at large t
    they divide by a catastrophically cancelled ``s**2 - |v|**2``.)
    """
    d, b = _unpack(x)
    det = x[2] * x[4] - x[3] * x[3]
    v = n @ b
    vn = np.linalg.norm(v, axis=1)
    h = c - n @ d - vn
    w = v / vn[:, None]
    grad_h = np.column_stack((-n[:, 0], -n[:, 1], -w[:, 0] * n[:, 0],
                              -(w[:, 0] * n[:, 1] + w[:, 1] * n[:, 0]), -w[:, 1] * n[:, 1]))
    grad_f = np.array([0.0, 0.0, -x[4] / det, 2.0 * x[3] / det, -x[2] / det])
    idx = np.flatnonzero(h < active)
    lam = np.zeros(len(c))
    if len(idx):
        lam[idx], _ = nnls(grad_h[idx].T, grad_f)
    stationarity = float(np.abs(grad_f - grad_h.T @ lam).max())
    complementarity = float(np.abs(lam * h).max())
    infeasibility = float(max(0.0, -h.min()))
    return max(stationarity, complementarity, infeasibility)


def _newton_center(x, n, c, t, budget):
    """Damped Newton on the barrier problem at weight ``t``; returns (x, steps, ok)."""
    steps, prev = 0, math.inf
    while steps < budget:
        val, grad, hess = _barrier_terms(x, n, c, t)
        try:
            dx = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            dx = -np.linalg.lstsq(hess, grad, rcond=None)[0]
        lam2 = float(-grad @ dx)
        steps += 1
        if not np.all(np.isfinite(dx)) or lam2 < 1e-20:
            return x, steps, True
        if lam2 < 1e-2:
            # quadratic region of a self-concordant barrier: full steps stay in
            # the domain, and at large t the value is too noisy for Armijo
            trial = x + dx
            if _barrier_terms(trial, n, c, t) is None:
                return x, steps, lam2 < 1e-10
            x = trial
            if lam2 < 1e-14 or lam2 > 0.5 * prev:
                return x, steps, True
            prev = lam2
            continue
        step = 1.0
        while True:
            trial = x + step * dx
            tv = _barrier_terms(trial, n, c, t)
            if tv is not None and tv[0] <= val - 0.25 * step * lam2:
                break
            step *= 0.5
            if step < 1e-12:
                return x, steps, False
        x = trial
    return x, steps, False


def max_area_inscribed_ellipse(k: Polygon, tol: float = 1e-9) -> JohnResult:
    if not (0.0 < tol <= 1e-3):
        raise ValidationError(f"tol must lie in (0, 1e-3], got {tol}")
    if k.area <= 1e-12 * k.diameter ** 2:
        raise DegeneratePolygon("polygon has (near-)zero area")
    n, c = _edge_data(k)
    # centred, scaled coordinates keep the barrier well conditioned
    origin = np.mean(np.array(k.vertices), axis=0)
    scale = k.diameter
    cs = (c - n @ origin) / scale
    r0 = 0.5 * float(np.min(cs))
    x = np.array([0.0, 0.0, r0, 0.0, r0])
    m = len(c)

    t, mu = 1.0, 16.0
    # stop well past tol: parameter error on the central path tracks the gap
    gap_target = min(tol, 1e-9) * 1e-3
    total = 0
    while True:
        x, used, _ = _newton_center(x, n, cs, t, MAX_ITER - total)
        total += used
        if 2.0 * m / t < gap_target or total >= MAX_ITER:
            break
        t *= mu
    kkt = _kkt_residual(x, n, cs)
    converged = total < MAX_ITER and kkt < tol

    d, b = _unpack(x)
    center = origin + scale * d
    shape = scale * b
    ellipse = EllipseBody(Point(float(center[0]), float(center[1])), shape)
    slacks = scale * _slacks(x, n, cs)
    objective = math.log(math.pi * float(np.linalg.det(shape)))
    result = JohnResult(ellipse, [], objective, kkt, total, converged, None, slacks)
    result.contacts = _contacts(result, k, tol)
    result.audit_passed = perturbation_audit(result, k)
    return result


def _tangency(e: EllipseBody, nrm) -> Point:
    bn = np.asarray(e.shape) @ np.asarray(nrm)
    p = np.asarray(e.center) + np.asarray(e.shape) @ (bn / np.linalg.norm(bn))
    return Point(float(p[0]), float(p[1]))


def _contacts(r: JohnResult, k: Polygon, tol: float) -> list[tuple[Point, int]]:
    thresh = max(tol, 1e-7) * max(1.0, k.diameter)
    found = [(_tangency(r.ellipse, k.normals[i]), i)
             for i in range(len(k.normals)) if r.slacks[i] < thresh]
    cx, cy = r.ellipse.center
    found.sort(key=lambda pe: math.atan2(pe[0].y - cy, pe[0].x - cx))
    return found


def contact_points(r: JohnResult, polygon: Polygon, tol: float = 1e-9) -> list[Point]:
    return [p for p, _ in _contacts(r, polygon, tol)]


def perturbation_audit(r: JohnResult, k: Polygon, samples: int = AUDIT_SAMPLES,
                       size: float = 1e-3, seed: int = 0) -> bool:
    """Random nearby feasible ellipses must not beat the solver's area.

    Each perturbed (center, shape) is shrunk about its centre just enough to be
    feasible again, then its log-area is compared with the optimum.
    """
    rng = np.random.default_rng(seed)
    n, c = _edge_data(k)
    d0 = np.asarray(r.ellipse.center)
    b0 = np.asarray(r.ellipse.shape)
    h = size * k.diameter
    best = math.log(float(np.linalg.det(b0)))
    for _ in range(samples):
        d = d0 + h * rng.standard_normal(2)
        e = h * rng.standard_normal(3)
        b = b0 + np.array([[e[0], e[1]], [e[1], e[2]]])
        if np.linalg.eigvalsh(b)[0] <= 0:
            continue
        room = c - n @ d
        if np.any(room <= 0):
            continue
        alpha = min(1.0, float(np.min(room / np.linalg.norm(n @ b, axis=1))))
        if math.log(alpha * alpha * float(np.linalg.det(b))) > best + 1e-12:
            return False
    return True


def steiner_inellipse(t: Triangle) -> EllipseBody:
    """Ellipse centred at the centroid and tangent to each side at its midpoint."""
    A, B, C = (np.asarray(p, dtype=float) for p in t)
    diam = max(np.linalg.norm(A - B), np.linalg.norm(B - C), np.linalg.norm(A - C))
    if diam == 0.0 or abs(twice_signed_area(*t)) <= 1e-12 * diam * diam:
        raise DegenerateTriangle("Steiner inellipse needs a non-degenerate triangle")
    g = (A + B + C) / 3.0
    # conjugate semi-diameters (C - G)/2 and (B - A)/(2 sqrt 3)
    m = np.column_stack(((C - g) / 2.0, (B - A) / (2.0 * math.sqrt(3.0))))
    return EllipseBody.from_map(g, m)
