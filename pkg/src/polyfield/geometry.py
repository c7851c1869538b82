"""Parametric curve primitives: evaluation, tangents, closest points, intersections.

Primitives are immutable and live in real-valued pixel coordinates
(x rightward, y downward, origin at the canvas top-left). All evaluation
routines accept scalar or array parameters and broadcast; direction angles
are always reduced to the half-turn range [0, pi) because downstream field
directions are sign-free.

Closest-point projection is analytic for segments and arcs; Beziers use a
64-sample scan refined by golden sections in every sampled local-minimum
basin, which keeps the reported distance within 1e-3 px of the true
minimum (the squared-distance polynomial has at most three interior
minima, all of which the scan sees at canvas scale).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateTangentError",
    "LineSegment",
    "Arc",
    "CubicBezier",
    "Primitive",
    "Junction",
    "Scene",
    "reduce_half_turn",
    "tangent_angle",
    "closest_point",
    "closest_point_many",
    "intersections",
    "scene_junctions",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_COARSE_SAMPLES = 64
_GOLDEN_ITERS = 26
_EPS_SPEED = 1e-12
_TWO_PI = 2.0 * math.pi


class DegenerateTangentError(ValueError):
    """The curve derivative vanished, so no tangent direction exists there."""


def reduce_half_turn(angle):
    """Reduce an angle (or array of angles) modulo pi into [0, pi)."""
    a = np.mod(np.asarray(angle, dtype=float), np.pi)
    # mod can round up to pi exactly for tiny negative inputs
    a = np.where(a >= np.pi, a - np.pi, a)
    if a.ndim == 0:
        return float(a)
    return a


def _check_unit_interval(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError("curve parameter outside [0, 1]")
    return t


def _pt(p) -> tuple[float, float]:
    return (float(p[0]), float(p[1]))


@dataclass(frozen=True)
class LineSegment:
    """Straight segment from p0 to p1."""

    p0: tuple[float, float]
    p1: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "p0", _pt(self.p0))
        object.__setattr__(self, "p1", _pt(self.p1))
        if self.p0 == self.p1:
            raise ValueError("degenerate segment: p0 == p1")

    def point(self, t):
        t = _check_unit_interval(t)
        a = np.asarray(self.p0)
        b = np.asarray(self.p1)
        return a + np.multiply.outer(t, b - a)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        d = np.asarray(self.p1) - np.asarray(self.p0)
        return np.broadcast_to(d, t.shape + (2,)).copy()

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + (2,))


@dataclass(frozen=True)
class Arc:
    """Circular arc swept from angle_start to angle_end around center.

    The sweep may run in either direction; its magnitude is capped at a
    full turn.
    """

    center: tuple[float, float]
    radius: float
    angle_start: float
    angle_end: float

    def __post_init__(self):
        object.__setattr__(self, "center", _pt(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "angle_start", float(self.angle_start))
        object.__setattr__(self, "angle_end", float(self.angle_end))
        if self.radius <= 0.0:
            raise ValueError("arc radius must be positive")
        span = self.angle_end - self.angle_start
        if span == 0.0:
            raise ValueError("arc sweep is empty")
        if abs(span) > _TWO_PI + 1e-12:
            raise ValueError("arc sweep exceeds a full turn")

    def _theta(self, t):
        return self.angle_start + np.asarray(t, dtype=float) * (
            self.angle_end - self.angle_start
        )

    def point(self, t):
        t = _check_unit_interval(t)
        th = self._theta(t)
        c = np.asarray(self.center)
        return c + self.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def derivative(self, t):
        th = self._theta(t)
        span = self.angle_end - self.angle_start
        return self.radius * span * np.stack([-np.sin(th), np.cos(th)], axis=-1)

    def second_derivative(self, t):
        th = self._theta(t)
        span = self.angle_end - self.angle_start
        return -self.radius * span * span * np.stack([np.cos(th), np.sin(th)], axis=-1)


@dataclass(frozen=True)
class CubicBezier:
    """Cubic Bezier curve with control points p0..p3."""

    p0: tuple[float, float]
    p1: tuple[float, float]
    p2: tuple[float, float]
    p3: tuple[float, float]

    def __post_init__(self):
        for name in ("p0", "p1", "p2", "p3"):
            object.__setattr__(self, name, _pt(getattr(self, name)))
        if self.p0 == self.p1 == self.p2 == self.p3:
            raise ValueError("degenerate bezier: all control points identical")

    def _ctrl(self):
        return np.asarray([self.p0, self.p1, self.p2, self.p3])

    def _power_coeffs(self):
        """Monomial coefficients (4, 2): P(t) = a0 + a1 t + a2 t^2 + a3 t^3."""
        c = self._ctrl()
        return np.stack(
            [
                c[0],
                3.0 * (c[1] - c[0]),
                3.0 * (c[2] - 2.0 * c[1] + c[0]),
                c[3] - 3.0 * c[2] + 3.0 * c[1] - c[0],
            ]
        )

    def point(self, t):
        t = _check_unit_interval(t)
        c = self._ctrl()
        u = 1.0 - t
        w = np.stack([u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t], axis=-1)
        return w @ c

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        c = self._ctrl()
        d = 3.0 * (c[1:] - c[:-1])
        u = 1.0 - t
        w = np.stack([u * u, 2.0 * u * t, t * t], axis=-1)
        return w @ d

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        c = self._ctrl()
        d2 = 6.0 * (c[2:] - 2.0 * c[1:-1] + c[:-2])
        w = np.stack([1.0 - t, t], axis=-1)
        return w @ d2


Primitive = LineSegment | Arc | CubicBezier


def _poly_eval(coef: np.ndarray, t: np.ndarray):
    """Horner evaluation of per-coordinate polynomials; coef is (deg+1, 2)."""
    x = np.full_like(t, coef[-1, 0])
    y = np.full_like(t, coef[-1, 1])
    for k in range(len(coef) - 2, -1, -1):
        x = x * t + coef[k, 0]
        y = y * t + coef[k, 1]
    return x, y


def _eval_unchecked(prim: Primitive, t: np.ndarray):
    """(x, y) arrays without the [0,1] domain check; hot-path helper."""
    if isinstance(prim, LineSegment):
        (x0, y0), (x1, y1) = prim.p0, prim.p1
        return x0 + t * (x1 - x0), y0 + t * (y1 - y0)
    if isinstance(prim, Arc):
        th = prim.angle_start + t * (prim.angle_end - prim.angle_start)
        return (
            prim.center[0] + prim.radius * np.cos(th),
            prim.center[1] + prim.radius * np.sin(th),
        )
    return _poly_eval(prim._power_coeffs(), t)


@dataclass(frozen=True)
class Junction:
    """A close approach of two scene primitives (indices into the scene)."""

    index_a: int
    index_b: int
    t_a: float
    t_b: float
    point: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "point", _pt(self.point))

    def involves(self, index: int) -> bool:
        return index == self.index_a or index == self.index_b

    def other_side(self, index: int) -> tuple[int, float]:
        """(primitive index, parameter) of the curve opposite `index`."""
        if index == self.index_a:
            return self.index_b, self.t_b
        if index == self.index_b:
            return self.index_a, self.t_a
        raise ValueError(f"junction does not involve primitive {index}")


def _primitive_to_obj(prim: Primitive) -> dict:
    if isinstance(prim, LineSegment):
        return {"type": "line", "p0": list(prim.p0), "p1": list(prim.p1)}
    if isinstance(prim, Arc):
        return {
            "type": "arc",
            "center": list(prim.center),
            "radius": prim.radius,
            "angle_start": prim.angle_start,
            "angle_end": prim.angle_end,
        }
    if isinstance(prim, CubicBezier):
        return {
            "type": "cubic_bezier",
            "p0": list(prim.p0),
            "p1": list(prim.p1),
            "p2": list(prim.p2),
            "p3": list(prim.p3),
        }
    raise TypeError(f"unknown primitive {type(prim).__name__}")


def _primitive_from_obj(obj: dict) -> Primitive:
    kind = obj.get("type")
    if kind == "line":
        return LineSegment(obj["p0"], obj["p1"])
    if kind == "arc":
        return Arc(obj["center"], obj["radius"], obj["angle_start"], obj["angle_end"])
    if kind == "cubic_bezier":
        return CubicBezier(obj["p0"], obj["p1"], obj["p2"], obj["p3"])
    raise ValueError(f"unknown primitive type {kind!r}")


@dataclass(frozen=True)
class Scene:
    """An ordered collection of primitives on a width x height pixel canvas."""

    width: int
    height: int
    primitives: tuple[Primitive, ...]

    def __post_init__(self):
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if self.width <= 0 or self.height <= 0:
            raise ValueError("canvas dimensions must be positive")

    def to_obj(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "primitives": [_primitive_to_obj(p) for p in self.primitives],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "Scene":
        return cls(
            obj["width"],
            obj["height"],
            tuple(_primitive_from_obj(p) for p in obj["primitives"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Scene":
        return cls.from_obj(json.loads(text))


def tangent_angle(prim: Primitive, t, *, fallback: bool = False):
    """Slope angle of the unit tangent at t, reduced to [0, pi).

    Raises DegenerateTangentError where the derivative vanishes unless
    fallback=True, which substitutes a one-sided finite difference of step
    1e-4 in t at those parameters.
    """
    t = _check_unit_interval(t)
    d = prim.derivative(t)
    speed2 = d[..., 0] ** 2 + d[..., 1] ** 2
    bad = speed2 < _EPS_SPEED**2
    if np.any(bad):
        if not fallback:
            raise DegenerateTangentError("zero curve derivative; no tangent direction")
        h = 1e-4
        tb = np.asarray(t, dtype=float)[bad] if d.ndim > 1 else np.asarray([t])
        step = np.where(tb <= 1.0 - h, h, -h)
        diff = prim.point(tb + step) - prim.point(tb)
        if d.ndim > 1:
            d = d.copy()
            d[bad] = diff
        else:
            d = diff[0]
    angle = reduce_half_turn(np.arctan2(d[..., 1], d[..., 0]))
    if np.ndim(t) == 0:
        return float(angle)
    return angle


def _segment_closest(seg: LineSegment, pts: np.ndarray):
    a = np.asarray(seg.p0)
    ab = np.asarray(seg.p1) - a
    t = np.clip((pts - a) @ ab / (ab @ ab), 0.0, 1.0)
    dx = pts[:, 0] - (a[0] + t * ab[0])
    dy = pts[:, 1] - (a[1] + t * ab[1])
    return t, np.sqrt(dx * dx + dy * dy)


def _arc_closest(arc: Arc, pts: np.ndarray):
    """Exact projection: clamp each query point's polar angle into the
    swept interval, else take the nearer endpoint."""
    cx, cy = arc.center
    span = arc.angle_end - arc.angle_start
    theta = np.arctan2(pts[:, 1] - cy, pts[:, 0] - cx)
    if span > 0.0:
        delta = np.mod(theta - arc.angle_start, _TWO_PI)
        inside = delta <= span
    else:
        delta = -np.mod(arc.angle_start - theta, _TWO_PI)
        inside = delta >= span
    t = np.where(inside, delta / span, 0.0)

    rad = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
    d_in = np.abs(rad - arc.radius)

    e0x = cx + arc.radius * math.cos(arc.angle_start)
    e0y = cy + arc.radius * math.sin(arc.angle_start)
    e1x = cx + arc.radius * math.cos(arc.angle_end)
    e1y = cy + arc.radius * math.sin(arc.angle_end)
    d0 = np.hypot(pts[:, 0] - e0x, pts[:, 1] - e0y)
    d1 = np.hypot(pts[:, 0] - e1x, pts[:, 1] - e1y)
    t_end = np.where(d1 < d0, 1.0, 0.0)
    d_end = np.minimum(d0, d1)

    t = np.where(inside, t, t_end)
    d = np.where(inside, d_in, d_end)
    return t, d


def _bezier_closest(bez: CubicBezier, pts: np.ndarray, refine_below):
    """Coarse scan over 64 parameters, then golden-section refinement of
    every sampled local-minimum basin (competing closest approaches all
    get polished; the best survives)."""
    coef = bez._power_coeffs()
    ts = np.linspace(0.0, 1.0, _COARSE_SAMPLES)
    sx, sy = _poly_eval(coef, ts)
    dx = pts[:, 0, None] - sx[None, :]
    dy = pts[:, 1, None] - sy[None, :]
    dist2 = dx * dx + dy * dy

    imin = np.argmin(dist2, axis=1)
    rows = np.arange(len(pts))
    t_out = ts[imin]
    d_out = np.sqrt(dist2[rows, imin])

    if refine_below is None:
        refine = np.ones(len(pts), dtype=bool)
    else:
        # a coarse minimum overestimates the true distance by at most half
        # the largest chord between consecutive samples
        chord2 = (sx[1:] - sx[:-1]) ** 2 + (sy[1:] - sy[:-1]) ** 2
        half_chord = 0.5 * math.sqrt(float(chord2.max()))
        refine = d_out <= refine_below + half_chord
    if not np.any(refine):
        return t_out, d_out

    sub = dist2[refine]
    padded = np.pad(sub, ((0, 0), (1, 1)), constant_values=np.inf)
    locmin = (sub <= padded[:, :-2]) & (sub <= padded[:, 2:])
    qi, si = np.nonzero(locmin)

    lo = ts[np.maximum(si - 1, 0)]
    hi = ts[np.minimum(si + 1, _COARSE_SAMPLES - 1)]
    bx = pts[refine, 0][qi]
    by = pts[refine, 1][qi]

    def dist2_at(t):
        x, y = _poly_eval(coef, t)
        return (x - bx) ** 2 + (y - by) ** 2

    best_t = ts[si]
    best_d2 = sub[qi, si]
    for _ in range(_GOLDEN_ITERS):
        h = hi - lo
        x1 = hi - _GOLDEN * h
        x2 = lo + _GOLDEN * h
        f1 = dist2_at(x1)
        f2 = dist2_at(x2)
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        for xv, fv in ((x1, f1), (x2, f2)):
            better = fv < best_d2
            best_t = np.where(better, xv, best_t)
            best_d2 = np.where(better, fv, best_d2)

    # keep the best basin per query point
    nref = int(np.sum(refine))
    order = np.lexsort((best_d2, qi))
    uq, first = np.unique(qi[order], return_index=True)
    red_t = np.zeros(nref)
    red_d2 = np.full(nref, np.inf)
    red_t[uq] = best_t[order][first]
    red_d2[uq] = best_d2[order][first]

    t_ref = t_out[refine]
    d_ref = d_out[refine]
    red_d = np.sqrt(red_d2)
    improved = red_d < d_ref
    t_ref[improved] = red_t[improved]
    d_ref[improved] = red_d[improved]

    # Newton cleanup of the stationarity (P(t) - q) . P'(t) = 0; the golden
    # bracket still holds ~1e-7 of t, which downstream tangent angles would
    # amplify. Steps are clamped and only kept when the distance improves,
    # so clamped endpoint minima stay put.
    dcoef = coef[1:] * np.array([1.0, 2.0, 3.0])[:, None]
    d2coef = dcoef[1:] * np.array([1.0, 2.0])[:, None]
    qx = pts[refine, 0]
    qy = pts[refine, 1]
    t_start = t_ref.copy()
    f_start = d_ref**2
    t_cur = t_ref
    for _ in range(4):
        px, py = _poly_eval(coef, t_cur)
        vx, vy = _poly_eval(dcoef, t_cur)
        ax2, ay2 = _poly_eval(d2coef, t_cur)
        rx = px - qx
        ry = py - qy
        g = rx * vx + ry * vy
        gp = vx * vx + vy * vy + rx * ax2 + ry * ay2
        # the golden bracket leaves at most ~1e-7 of t, so a trustworthy
        # Newton step is tiny; anything larger means a flat or concave
        # basin and is skipped
        step = np.where(gp > 1e-12, g / np.where(gp > 1e-12, gp, 1.0), 0.0)
        step = np.where(np.abs(step) <= 1e-3, step, 0.0)
        t_cur = np.clip(t_cur - step, 0.0, 1.0)
    ex, ey = _poly_eval(coef, t_cur)
    f_cur = (ex - qx) ** 2 + (ey - qy) ** 2
    keep = f_cur <= f_start + 1e-9
    t_cur = np.where(keep, t_cur, t_start)
    f_cur = np.where(keep, f_cur, f_start)

    t_out[refine] = t_cur
    d_out[refine] = np.sqrt(f_cur)
    return t_out, d_out


def closest_point_many(prim: Primitive, pts, refine_below=None):
    """Per query point, the parameter and distance of the nearest curve point.

    pts is an (n, 2) array. refine_below skips Bezier basin refinement for
    points whose distance provably exceeds it; their reported distance may
    then overestimate by up to half a coarse chord.
    """
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if isinstance(prim, LineSegment):
        return _segment_closest(prim, pts)
    if isinstance(prim, Arc):
        return _arc_closest(prim, pts)
    return _bezier_closest(prim, pts, refine_below)


def closest_point(prim: Primitive, p) -> tuple[float, float]:
    """(t, distance) of the point on the curve nearest to p."""
    t, d = closest_point_many(prim, np.asarray(p, dtype=float)[None, :])
    return float(t[0]), float(d[0])


def _newton_polish(a: Primitive, b: Primitive, s, t, iters=10):
    """Projected Newton on F(s,t) = |a(s) - b(t)|^2 / 2 with step
    backtracking; transversal crossings converge quadratically, clamped
    minima stop at the box edge."""

    def fval(s_, t_):
        ax, ay = _eval_unchecked(a, s_)
        bx, by = _eval_unchecked(b, t_)
        return (ax - bx) ** 2 + (ay - by) ** 2

    f = fval(s, t)
    for _ in range(iters):
        pa = a.point(s)
        pb = b.point(t)
        da = a.derivative(s)
        db = b.derivative(t)
        d2a = a.second_derivative(s)
        d2b = b.second_derivative(t)
        r = pa - pb
        gs = np.sum(r * da, axis=-1)
        gt = -np.sum(r * db, axis=-1)
        hss = np.sum(da * da, axis=-1) + np.sum(r * d2a, axis=-1)
        hst = -np.sum(da * db, axis=-1)
        htt = np.sum(db * db, axis=-1) - np.sum(r * d2b, axis=-1)
        det = hss * htt - hst * hst
        ok = np.abs(det) > 1e-14
        den = np.where(ok, det, 1.0)
        ds = np.where(ok, -(htt * gs - hst * gt) / den, -gs)
        dt = np.where(ok, -(hss * gt - hst * gs) / den, -gt)
        step = np.ones_like(s)
        s_new, t_new, f_new = s, t, f
        for _ in range(4):
            cs = np.clip(s + step * ds, 0.0, 1.0)
            ct = np.clip(t + step * dt, 0.0, 1.0)
            cf = fval(cs, ct)
            better = cf < f_new
            s_new = np.where(better, cs, s_new)
            t_new = np.where(better, ct, t_new)
            f_new = np.where(better, cf, f_new)
            step *= 0.5
        s, t, f = s_new, t_new, f_new
    return s, t, f


def _coordinate_polish(a: Primitive, b: Primitive, s, t, window=0.02, rounds=2):
    """Per-variable golden cleanup for minima clamped to the box edge,
    where the joint Newton step is not the optimal one."""
    for _ in range(rounds):
        for refine_t in (False, True):
            if refine_t:
                qx, qy = _eval_unchecked(a, s)
                lo = np.clip(t - window, 0.0, 1.0)
                hi = np.clip(t + window, 0.0, 1.0)
                curve = b
            else:
                qx, qy = _eval_unchecked(b, t)
                lo = np.clip(s - window, 0.0, 1.0)
                hi = np.clip(s + window, 0.0, 1.0)
                curve = a

            best = hi.copy()
            ex, ey = _eval_unchecked(curve, best)
            fbest = (ex - qx) ** 2 + (ey - qy) ** 2
            for cand in (lo, np.clip(0.5 * (lo + hi), 0.0, 1.0)):
                ex, ey = _eval_unchecked(curve, cand)
                fc = (ex - qx) ** 2 + (ey - qy) ** 2
                better = fc < fbest
                best = np.where(better, cand, best)
                fbest = np.where(better, fc, fbest)
            for _ in range(18):
                h = hi - lo
                x1 = hi - _GOLDEN * h
                x2 = lo + _GOLDEN * h
                e1x, e1y = _eval_unchecked(curve, x1)
                e2x, e2y = _eval_unchecked(curve, x2)
                f1 = (e1x - qx) ** 2 + (e1y - qy) ** 2
                f2 = (e2x - qx) ** 2 + (e2y - qy) ** 2
                left = f1 < f2
                hi = np.where(left, x2, hi)
                lo = np.where(left, lo, x1)
                for xv, fv in ((x1, f1), (x2, f2)):
                    better = fv < fbest
                    best = np.where(better, xv, best)
                    fbest = np.where(better, fv, fbest)
            if refine_t:
                t = best
            else:
                s = best
    return s, t


def intersections(
    a: Primitive, b: Primitive, tol: float = 0.5, index_a: int = 0, index_b: int = 1
) -> list[Junction]:
    """All close approaches of two curves within tol pixels, each once.

    Transversal crossings give exact meeting points; tangential approaches
    are reported whenever the curves pass within tol and are not treated
    specially. Candidates come from the local minima of a 64x64 parameter
    grid of squared distances and are polished by projected Newton plus a
    per-variable golden cleanup, so crossings land at machine precision.
    """
    if tol <= 0.0:
        raise ValueError("intersection tolerance must be positive")
    n = _COARSE_SAMPLES
    sa = np.linspace(0.0, 1.0, n)
    ax, ay = _eval_unchecked(a, sa)
    bx, by = _eval_unchecked(b, sa)
    dx = ax[:, None] - bx[None, :]
    dy = ay[:, None] - by[None, :]
    grid = dx * dx + dy * dy

    padded = np.pad(grid, 1, constant_values=np.inf)
    locmin = np.ones((n, n), dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            locmin &= grid <= padded[1 + di : 1 + di + n, 1 + dj : 1 + dj + n]

    chord_a = float(np.max((ax[1:] - ax[:-1]) ** 2 + (ay[1:] - ay[:-1]) ** 2))
    chord_b = float(np.max((bx[1:] - bx[:-1]) ** 2 + (by[1:] - by[:-1]) ** 2))
    slack = 0.5 * (math.sqrt(chord_a) + math.sqrt(chord_b))
    ia, ib = np.nonzero(locmin & (grid <= (tol + slack) ** 2))
    if len(ia) == 0:
        return []

    s = sa[ia]
    t = sa[ib]
    s, t, _ = _newton_polish(a, b, s, t)
    s, t = _coordinate_polish(a, b, s, t)
    s, t, _ = _newton_polish(a, b, s, t, iters=3)

    qa = a.point(s)
    qb = b.point(t)
    d = np.hypot(qa[:, 0] - qb[:, 0], qa[:, 1] - qb[:, 1])
    keep = d <= tol
    if not np.any(keep):
        return []
    s, t = s[keep], t[keep]
    mid = 0.5 * (qa[keep] + qb[keep])

    # deduplicate by meeting point; keep the lowest parameters
    order = np.lexsort((t, s))
    out: list[Junction] = []
    for k in order:
        p = (float(mid[k, 0]), float(mid[k, 1]))
        if any(math.hypot(p[0] - j.point[0], p[1] - j.point[1]) < 1e-3 for j in out):
            continue
        out.append(Junction(index_a, index_b, float(s[k]), float(t[k]), p))
    return out


def scene_junctions(scene: Scene, tol: float = 0.5) -> list[Junction]:
    """Pairwise junctions of every primitive pair in the scene."""
    out: list[Junction] = []
    prims = scene.primitives
    for i in range(len(prims)):
        for j in range(i + 1, len(prims)):
            out.extend(intersections(prims[i], prims[j], tol, i, j))
    return out
