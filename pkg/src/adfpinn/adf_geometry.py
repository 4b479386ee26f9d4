"""Approximate distance fields (ADFs) for boundaries, their joins, and transfinite data.

Every construction returns a :class:`ScalarField`.  A field is evaluated either on an
array of points ``[..., d]`` or on a sequence of ``d`` coordinates, and the coordinates
may be :class:`~adfpinn.autodiff.Jet` objects, so every ADF can be differentiated up to
fourth order by the jet machinery.
"""

from __future__ import annotations

import contextlib
import threading
from dataclasses import dataclass
from math import gamma, pi, sqrt as _sqrt
from pathlib import Path
from typing import Callable, Sequence

import jax.numpy as jnp
import numpy as np

from . import autodiff as ad
from .autodiff import Jet, primal

# ---------------------------------------------------------------------------- fields


def _coords(x) -> list:
    if isinstance(x, (list, tuple)):
        return [c if isinstance(c, Jet) else jnp.asarray(c) for c in x]
    x = jnp.asarray(x)
    if x.ndim == 0:
        x = x[None]
    return [x[..., i] for i in range(x.shape[-1])]


class ScalarField:
    """A pure map from points in R^d to scalars, closed under arithmetic."""

    def __init__(self, fn: Callable[[list], object], name: str = "field"):
        self.fn = fn
        self.name = name

    def __call__(self, x):
        return self.fn(_coords(x))

    def __repr__(self) -> str:
        return f"ScalarField({self.name})"

    def _binary(self, other, op, sym):
        o = as_field(other)
        return ScalarField(lambda xs: op(self.fn(xs), o.fn(xs)), f"({self.name}{sym}{o.name})")

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b, "+")

    def __radd__(self, other):
        return as_field(other) + self

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, "-")

    def __rsub__(self, other):
        return as_field(other) - self

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b, "*")

    def __rmul__(self, other):
        return as_field(other) * self

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b, "/")

    def __rtruediv__(self, other):
        return as_field(other) / self

    def __neg__(self):
        return ScalarField(lambda xs: -self.fn(xs), f"-{self.name}")

    def __pow__(self, p):
        return ScalarField(lambda xs: self.fn(xs) ** p, f"{self.name}^{p}")

    def map(self, fn: Callable, name: str | None = None) -> "ScalarField":
        """Compose with a scalar function that understands jets (see ``autodiff``)."""
        return ScalarField(lambda xs: fn(self.fn(xs)), name or f"map({self.name})")

    def partials(self, dim: int) -> list["ScalarField"]:
        """The ``dim`` partial derivatives as fields (differentiable again)."""
        return [
            ScalarField(lambda xs, i=i: ad.partials(self.fn, xs)[i], f"d{i}({self.name})")
            for i in range(dim)
        ]


def as_field(value) -> ScalarField:
    if isinstance(value, ScalarField):
        return value
    if callable(value):
        return ScalarField(value, getattr(value, "__name__", "fn"))
    c = float(value)
    return ScalarField(lambda xs: jnp.zeros_like(primal(xs[0])) + c, repr(c))


def constant(c: float) -> ScalarField:
    return as_field(c)


def coordinate(i: int) -> ScalarField:
    return ScalarField(lambda xs: xs[i], f"x{i}")


# ---------------------------------------------------------------------------- record/replay of expensive fields

_tape_state = threading.local()


class _Tape:
    def __init__(self, values=None):
        self.replay = values is not None
        self.values = list(values) if values is not None else []
        self.pos = 0


@contextlib.contextmanager
def geometry_tape(values=None):
    """Record (``values=None``) or replay evaluations of memoized fields.

    Memoized fields depend only on the input points, so an expensive evaluation can be
    recorded once for a fixed point set and replayed inside every training step.  Calls
    are matched by order, which is fixed because the evaluation graph is.
    """
    stack = getattr(_tape_state, "stack", None)
    if stack is None:
        stack = _tape_state.stack = []
    tape = _Tape(values)
    stack.append(tape)
    try:
        yield tape
    finally:
        stack.pop()


def memoized(f: ScalarField) -> ScalarField:
    def fn(xs):
        stack = getattr(_tape_state, "stack", None)
        if not stack:
            return f.fn(xs)
        tape = stack[-1]
        if tape.replay:
            v = tape.values[tape.pos]
            tape.pos += 1
            return v
        v = f.fn(xs)
        tape.values.append(v)
        return v

    return ScalarField(fn, f"memo({f.name})")


# ---------------------------------------------------------------------------- geometry types


class BoundaryProximityError(ValueError):
    """A singular boundary kernel was evaluated on (or too near) its boundary."""


@dataclass(frozen=True)
class Segment:
    x1: tuple
    x2: tuple

    def __post_init__(self):
        a = np.asarray(self.x1, float)
        b = np.asarray(self.x2, float)
        if a.shape != (2,) or b.shape != (2,):
            raise ValueError("segments are two-dimensional")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("segment endpoints must be finite")
        if np.hypot(*(b - a)) == 0.0:
            raise ValueError("degenerate segment of zero length")

    @property
    def length(self) -> float:
        return float(np.hypot(self.x2[0] - self.x1[0], self.x2[1] - self.x1[1]))

    @property
    def midpoint(self) -> tuple:
        return ((self.x1[0] + self.x2[0]) / 2.0, (self.x1[1] + self.x2[1]) / 2.0)


def _signed_area(loop: np.ndarray) -> float:
    x, y = loop[:, 0], loop[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class Polygon:
    """Vertex loops: outer loop counterclockwise first, holes clockwise.

    Orientation is derived from the signed area.  With ``strict=True`` a loop with the
    wrong orientation is an error; otherwise it is reversed.
    """

    def __init__(self, loops: Sequence, strict: bool = False):
        if not loops:
            raise ValueError("a polygon needs at least one loop")
        fixed = []
        for k, loop in enumerate(loops):
            v = np.asarray(loop, dtype=float)
            if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
                raise ValueError(f"loop {k} needs at least 3 two-dimensional vertices")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"loop {k} has non-finite vertices")
            if np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)):
                raise ValueError(f"loop {k} repeats a vertex consecutively")
            area = _signed_area(v)
            if area == 0.0:
                raise ValueError(f"loop {k} has zero area")
            want_ccw = k == 0
            if (area > 0) != want_ccw:
                if strict:
                    raise ValueError(f"loop {k} has the wrong orientation")
                v = v[::-1].copy()
            fixed.append(v)
        self.loops = fixed

    @classmethod
    def from_file(cls, path) -> "Polygon":
        """Read one ``x y`` vertex per line, loops separated by blank lines."""
        loops, cur = [], []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            s = line.strip()
            if not s:
                if cur:
                    loops.append(cur)
                    cur = []
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two numbers, got {s!r}")
            cur.append((float(parts[0]), float(parts[1])))
        if cur:
            loops.append(cur)
        return cls(loops)

    def to_text(self) -> str:
        blocks = ["\n".join(f"{float(x)!r} {float(y)!r}" for x, y in loop) for loop in self.loops]
        return "\n\n".join(blocks) + "\n"

    @property
    def vertices(self) -> np.ndarray:
        return np.concatenate(self.loops)

    @property
    def diameter(self) -> float:
        v = self.vertices
        q = v[:, None, :] - v[None, :, :]
        return float(np.max(np.hypot(q[..., 0], q[..., 1])))

    @property
    def area(self) -> float:
        return float(sum(_signed_area(l) for l in self.loops))

    @property
    def perimeter(self) -> float:
        return float(sum(np.sum(np.hypot(*(np.roll(l, -1, 0) - l).T)) for l in self.loops))

    def segments(self) -> list[Segment]:
        return [
            Segment(tuple(a), tuple(b))
            for loop in self.loops
            for a, b in zip(loop, np.roll(loop, -1, axis=0))
        ]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.concatenate(self.loops)
        b = np.concatenate([np.roll(l, -1, axis=0) for l in self.loops])
        return a, b

    def contains(self, points) -> np.ndarray:
        """Strict interior test by even-odd ray casting (boundary counts as outside)."""
        p = np.asarray(points, float)
        inside = np.zeros(p.shape[:-1], bool)
        a, b = self.edge_arrays()
        x, y = p[..., 0:1], p[..., 1:2]
        cond = (a[:, 1] > y) != (b[:, 1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
        inside = np.sum(cond & (x < xc), axis=-1) % 2 == 1
        return inside & (self.boundary_distance(p) > 0)

    def boundary_distance(self, points) -> np.ndarray:
        """Exact Euclidean distance to the nearest edge."""
        return _segment_distance(np.asarray(points, float), *self.edge_arrays())

    def sample_boundary(self, n: int, rng=None, avoid_vertices: float = 0.0):
        """``n`` boundary points, uniform in arc length, with inward unit normals.

        ``avoid_vertices`` excludes arc-length windows of that size around each vertex.
        Returns ``(points, normals, edge_index)``.
        """
        rng = np.random.default_rng(rng)
        a, b = self.edge_arrays()
        lengths = np.hypot(*(b - a).T)
        usable = np.maximum(lengths - 2 * avoid_vertices, 0.0)
        if usable.sum() <= 0:
            raise ValueError("vertex margin leaves no boundary to sample")
        cum = np.concatenate([[0.0], np.cumsum(usable)])
        s = rng.uniform(0.0, cum[-1], n)
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(a) - 1)
        t = (avoid_vertices + (s - cum[idx])) / lengths[idx]
        pts = a[idx] + t[:, None] * (b[idx] - a[idx])
        tangent = (b[idx] - a[idx]) / lengths[idx][:, None]
        normals = np.stack([-tangent[:, 1], tangent[:, 0]], axis=-1)
        return pts, normals, idx


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    rel = p[..., None, :] - a
    t = np.clip(np.sum(rel * d, -1) / np.sum(d * d, -1), 0.0, 1.0)
    q = p[..., None, :] - (a + t[..., None] * d)
    return np.min(np.hypot(q[..., 0], q[..., 1]), axis=-1)


def _segment_distance_jnp(x, y, a: np.ndarray, b: np.ndarray):
    dx, dy = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    rx, ry = x[..., None] - a[:, 0], y[..., None] - a[:, 1]
    t = jnp.clip((rx * dx + ry * dy) / (dx * dx + dy * dy), 0.0, 1.0)
    return jnp.min(jnp.hypot(rx - t * dx, ry - t * dy), axis=-1)


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> Polygon:
    k = np.arange(n)
    ang = phase + 2 * np.pi * k / n
    return Polygon([np.stack([center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)], -1)])


def rectangle(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    return Polygon([[(x0, y0), (x1, y0), (x1, y1), (x0, y1)]])


def l_shape() -> Polygon:
    """The unit square with its upper-right quarter removed."""
    return Polygon([[(0, 0), (1, 0), (1, 0.5), (0.5, 0.5), (0.5, 1), (0, 1)]])


@dataclass(frozen=True)
class ParametricCurve:
    """A curve ``c(t)``, ``t`` in [0, 1], given by vectorized callables for c and c'."""

    point: Callable[[np.ndarray], np.ndarray]
    tangent: Callable[[np.ndarray], np.ndarray]
    closed: bool = True

    def __post_init__(self):
        t = np.linspace(0.0, 1.0, 257)
        c, dc = np.asarray(self.point(t)), np.asarray(self.tangent(t))
        if self.closed and not np.allclose(c[0], c[-1], atol=1e-12):
            raise ValueError("closed curve must satisfy c(0) = c(1)")
        if np.any(np.hypot(dc[:, 0], dc[:, 1]) <= 0):
            raise ValueError("curve tangent vanishes")


def ellipse_curve(a: float, b: float, center=(0.0, 0.0)) -> ParametricCurve:
    """Counterclockwise ellipse with semi-axes ``a`` and ``b``."""
    w = 2 * np.pi
    return ParametricCurve(
        lambda t: np.stack([center[0] + a * np.cos(w * t), center[1] + b * np.sin(w * t)], -1),
        lambda t: np.stack([-a * w * np.sin(w * t), b * w * np.cos(w * t)], -1),
    )


def circle_curve(radius: float = 1.0, center=(0.0, 0.0)) -> ParametricCurve:
    return ellipse_curve(radius, radius, center)


@dataclass(frozen=True)
class AdfConfig:
    method: str = "req"
    m: int = 1
    p: int = 1
    quadrature_points: int = 256

    def __post_init__(self):
        if self.method not in ("req", "mvp", "exact", "product"):
            raise ValueError(f"unknown ADF method {self.method!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be an integer >= 1")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.quadrature_points < 16:
            raise ValueError("quadrature_points must be >= 16")


# ---------------------------------------------------------------------------- segment and circle ADFs


def line_signed_distance(seg: Segment) -> ScalarField:
    (x1, y1), (x2, y2) = seg.x1, seg.x2
    L = seg.length
    return ScalarField(
        lambda xs: ((xs[0] - x1) * (y2 - y1) - (xs[1] - y1) * (x2 - x1)) * (1.0 / L), "line"
    )


def trim_function(seg: Segment) -> ScalarField:
    xc, yc = seg.midpoint
    L = seg.length

    def fn(xs):
        dx, dy = xs[0] - xc, xs[1] - yc
        return ((L / 2.0) ** 2 - (dx * dx + dy * dy)) * (1.0 / L)

    return ScalarField(fn, "trim")


def segment_adf(seg: Segment) -> ScalarField:
    f_line = line_signed_distance(seg).fn
    f_trim = trim_function(seg).fn

    def fn(xs):
        f = f_line(xs)
        t = f_trim(xs)
        f2 = f * f
        varphi = ad.sqrt(t * t + f2 * f2)
        q = (varphi - t) * 0.5
        return ad.sqrt(f2 + q * q)

    return ScalarField(fn, "segment")


def circle_adf(center, radius: float) -> ScalarField:
    if not radius > 0:
        raise ValueError("radius must be positive")
    c = tuple(float(v) for v in center)

    def fn(xs):
        r2 = sum((x - ci) * (x - ci) for x, ci in zip(xs, c))
        return (radius * radius - r2) * (0.5 / radius)

    return ScalarField(fn, "circle")


def first_order_normalize(omega: ScalarField) -> ScalarField:
    """Rescale an implicit function so that its zero set has unit normal derivative."""

    def fn(xs):
        w = omega.fn(xs)
        g = ad.partials(omega.fn, xs)
        den2 = w * w + sum(gi * gi for gi in g)
        p = primal(den2)
        if not _is_traced(p) and np.any(np.asarray(p) == 0):
            raise ValueError("omega and its gradient vanish together")
        return w / ad.sqrt(den2)

    return ScalarField(fn, f"normalized({omega.name})")


def _is_traced(x) -> bool:
    import jax

    return isinstance(x, jax.core.Tracer)


# ---------------------------------------------------------------------------- R-functions and joins


def r_alpha_pair(w1, w2, alpha: float, kind: str = "disjunction") -> ScalarField:
    if not -1.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (-1, 1]")
    sign = _kind_sign(kind)
    a, b = as_field(w1), as_field(w2)

    def fn(xs):
        u, v = a.fn(xs), b.fn(xs)
        return (u + v + sign * ad.sqrt(u * u + v * v - 2.0 * alpha * u * v)) * (1.0 / (1.0 + alpha))

    return ScalarField(fn, f"R_alpha[{kind}]")


def r_s_pair(w1, w2, s: int, kind: str = "disjunction") -> ScalarField:
    if s < 1:
        raise ValueError("s must be >= 1")
    sign = _kind_sign(kind)
    a, b = as_field(w1), as_field(w2)

    def fn(xs):
        u, v = a.fn(xs), b.fn(xs)
        r2 = u * u + v * v
        zero = primal(r2) == 0
        safe = ad.where(zero, 1.0, r2)
        out = (u + v + sign * ad.sqrt(safe)) * ad.power(safe, s / 2.0)
        return ad.where(zero, 0.0, out)

    return ScalarField(fn, f"R_s[{kind}]")


def _kind_sign(kind: str) -> float:
    if kind == "disjunction":
        return 1.0
    if kind == "conjunction":
        return -1.0
    raise ValueError("kind must be 'disjunction' or 'conjunction'")


def _kahan_sum(terms: Sequence):
    total = terms[0]
    comp = total * 0.0
    for t in terms[1:]:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


def _req_values(vals: Sequence, m: int):
    zero = None
    for v in vals:
        z = primal(v) == 0
        zero = z if zero is None else (zero | z)
    safe = [ad.where(zero, 1.0, v) for v in vals]
    if m == 1:
        total = _kahan_sum([1.0 / v for v in safe])
        out = 1.0 / total
    else:
        total = _kahan_sum([1.0 / (v**m) for v in safe])
        out = ad.power(total, -1.0 / m)
    return ad.where(zero, 0.0, out)


def r_equivalence_join(fields: Sequence, m: int = 1) -> ScalarField:
    """Join ADFs by ``(sum phi_i^-m)^(-1/m)``; exactly zero where any input is zero."""
    if int(m) != m or m < 1:
        raise ValueError("m must be an integer >= 1")
    fs = [as_field(f) for f in fields]
    if not fs:
        raise ValueError("nothing to join")
    return ScalarField(lambda xs: _req_values([f.fn(xs) for f in fs], int(m)), f"REQ(m={m})")


def r_conjunction_join(w1, w2, s: int = 2) -> ScalarField:
    """``phi1 + phi2 - (phi1^s + phi2^s)^(1/s)``.  Not associative."""
    if s < 2:
        raise ValueError("s must be >= 2")
    a, b = as_field(w1), as_field(w2)

    def fn(xs):
        u, v = a.fn(xs), b.fn(xs)
        t = u**s + v**s
        zero = primal(t) == 0
        safe = ad.where(zero, 1.0, t)
        return ad.where(zero, 0.0, u + v - ad.power(safe, 1.0 / s))

    return ScalarField(fn, f"Rconj(s={s})")


def polygon_adf_req(poly: Polygon, m: int = 1) -> ScalarField:
    return r_equivalence_join([segment_adf(s) for s in poly.segments()], m)


# ---------------------------------------------------------------------------- mean value potentials


def _mvp_weight(poly: Polygon, xs):
    a, b = poly.edge_arrays()
    rx, ry = a[:, 0] - xs[0][..., None], a[:, 1] - xs[1][..., None]
    sx, sy = b[:, 0] - xs[0][..., None], b[:, 1] - xs[1][..., None]
    r = ad.sqrt(rx * rx + ry * ry)
    s = ad.sqrt(sx * sx + sy * sy)
    det = rx * sy - ry * sx
    dot = rx * sx + ry * sy
    t = det / (r * s + dot)
    return ((1.0 / r + 1.0 / s) * t).sum(axis=-1)


def _near_polygon(poly: Polygon, xs, eps: float):
    a, b = poly.edge_arrays()
    x, y = primal(xs[0]), primal(xs[1])
    x, y = jnp.broadcast_arrays(x, y)
    return _segment_distance_jnp(x, y, a, b) <= eps


def _safe_coords(xs, near, far):
    return [ad.where(near, far[i], x) for i, x in enumerate(xs)]


def mvp_polygon_weight(poly: Polygon) -> ScalarField:
    """The mean value potential W(x); singular on the boundary."""
    eps = 1e-9 * poly.diameter

    def fn(xs):
        near = _near_polygon(poly, xs, eps)
        if not _is_traced(near) and bool(jnp.any(near)):
            raise BoundaryProximityError("mean value potential evaluated on the boundary")
        return _mvp_weight(poly, xs)

    return ScalarField(fn, "mvp_weight")


def mvp_polygon_adf(poly: Polygon) -> ScalarField:
    """``2/W(x)`` inside, clamped to exactly 0 within ``1e-9 * diameter`` of an edge."""
    eps = 1e-9 * poly.diameter
    v = poly.vertices
    far = (float(v[:, 0].max() + 2.0 * poly.diameter), float(v[:, 1].max() + 1.3 * poly.diameter))

    def fn(xs):
        near = _near_polygon(poly, xs, eps)
        w = _mvp_weight(poly, _safe_coords(xs, near, far))
        return ad.where(near, 0.0, 2.0 / w)

    return ScalarField(fn, "mvp_polygon")


def mvp_scale(p: int) -> float:
    """Constant making ``(C_p / W_p)^(1/p)`` have unit normal derivative on the curve."""
    return _sqrt(pi) * gamma((p + 1) / 2.0) / gamma((p + 2) / 2.0)


def _gauss_panels(panels: int, nodes: int = 3) -> tuple[np.ndarray, np.ndarray]:
    g, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    t = (edges[:-1, None] + 0.5 * h[:, None] * (g[None, :] + 1.0)).ravel()
    wt = (0.5 * h[:, None] * w[None, :]).ravel()
    return t, wt


def mvp_curve_adf(curve: ParametricCurve, p: int = 1, nq: int = 256) -> ScalarField:
    """``(C_p / W_p)^(1/p)`` with ``W_p`` by composite Gauss-Legendre on ``nq`` panels.

    The result is memoized (see :func:`geometry_tape`) since the quadrature dominates
    the cost of a training step otherwise.
    """
    if nq < 64:
        raise ValueError("nq must be >= 64")
    if p < 1:
        raise ValueError("p must be >= 1")
    t, wt = _gauss_panels(nq)
    c = np.asarray(curve.point(t), float)
    dc = np.asarray(curve.tangent(t), float)
    nx, ny = dc[:, 1] * wt, -dc[:, 0] * wt  # c' rotated clockwise, times weights
    fine = np.asarray(curve.point(np.linspace(0.0, 1.0, 8 * nq + 1)), float)
    a, b = fine[:-1], fine[1:]
    span = np.ptp(fine, axis=0)
    diam = float(np.hypot(*span))
    eps = 1e-9 * diam
    far = (float(fine[:, 0].max() + 2 * diam), float(fine[:, 1].max() + 1.3 * diam))
    cp = mvp_scale(p)

    def fn(xs):
        x, y = primal(xs[0]), primal(xs[1])
        x, y = jnp.broadcast_arrays(x, y)
        near = _segment_distance_jnp(x, y, a, b) <= eps
        sx = _safe_coords(xs, near, far)
        dx, dy = c[:, 0] - sx[0][..., None], c[:, 1] - sx[1][..., None]
        r2 = dx * dx + dy * dy
        num = dx * nx + dy * ny
        if p == 1:
            kern = num / (r2 * ad.sqrt(r2))
        else:
            kern = num * ad.power(r2, -(2.0 + p) / 2.0)
        w = kern.sum(axis=-1)
        out = (cp / w) if p == 1 else ad.power(cp / w, 1.0 / p)
        out = ad.where(near, 0.0, out)
        val = primal(out)
        if not _is_traced(val) and not bool(jnp.all(jnp.isfinite(val))):
            raise FloatingPointError("curve potential quadrature produced non-finite values")
        return out

    return memoized(ScalarField(fn, "mvp_curve"))


# ---------------------------------------------------------------------------- transfinite interpolation


def transfinite_weights(phis: Sequence, mus: Sequence) -> list:
    """Partition-of-unity weights ``phi_i^-mu_i / sum_j phi_j^-mu_j`` in product form."""
    powers = [p**mu for p, mu in zip(phis, mus)]
    others = []
    for i in range(len(powers)):
        prod = None
        for j, pj in enumerate(powers):
            if j != i:
                prod = pj if prod is None else prod * pj
        others.append(prod if prod is not None else jnp.ones_like(primal(phis[0])))
    den = _kahan_sum(others)
    zero = primal(den) == 0
    den = ad.where(zero, 1.0, den)
    return [o / den for o in others]


def transfinite_interpolant(pieces: Sequence) -> ScalarField:
    """Blend per-piece data ``(adf, data, mu)`` so that data ``i`` holds where ``adf_i = 0``.

    Where several zero sets meet, the lowest-index piece wins.
    """
    if not pieces:
        raise ValueError("need at least one piece")
    phis = [as_field(p[0]) for p in pieces]
    data = [as_field(p[1]) for p in pieces]
    mus = [int(p[2]) if len(p) > 2 else 1 for p in pieces]
    if any(mu < 1 for mu in mus):
        raise ValueError("mu must be >= 1")

    def fn(xs):
        ph = [f.fn(xs) for f in phis]
        gs = [g.fn(xs) for g in data]
        ws = transfinite_weights(ph, mus)
        out = _kahan_sum([w * g for w, g in zip(ws, gs)])
        for p, g in reversed(list(zip(ph, gs))):
            out = ad.where(primal(p) == 0, g, out)
        return out

    return ScalarField(fn, "transfinite")


# ---------------------------------------------------------------------------- simple domains


def interval_adf(a: float, b: float, m: int = 1) -> ScalarField:
    """ADF of the interval (a, b); for m = 1 it equals (x-a)(b-x)/(b-a)."""
    return r_equivalence_join([coordinate(0) - a, b - coordinate(0)], m)


def hypercube_adf(d: int, m: int = 1) -> ScalarField:
    """ADF of (-1, 1)^d joining the strip fields (1 - x_i^2)/2."""
    if not 1 <= d <= 4:
        raise ValueError("d must be between 1 and 4")
    strips = [ScalarField(lambda xs, i=i: (1.0 - xs[i] * xs[i]) * 0.5, f"strip{i}") for i in range(d)]
    return r_equivalence_join(strips, m)


def product_adf(fields: Sequence) -> ScalarField:
    """Plain product of piece ADFs (zero on every piece, not normalized)."""
    fs = [as_field(f) for f in fields]

    def fn(xs):
        out = fs[0].fn(xs)
        for f in fs[1:]:
            out = out * f.fn(xs)
        return out

    return ScalarField(fn, "product")


def boundary_adf(poly: Polygon, config: AdfConfig = AdfConfig()) -> ScalarField:
    if config.method == "req":
        return polygon_adf_req(poly, config.m)
    if config.method == "mvp":
        return mvp_polygon_adf(poly)
    raise ValueError(f"method {config.method!r} needs problem-specific geometry")
