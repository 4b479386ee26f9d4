"""Point sampling, collocation/Ritz/eigen/Eikonal losses, and deterministic Adam training."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import jax
import jax.numpy as jnp
import numpy as np
from scipy.stats import qmc

from . import autodiff as ad
from .adf_geometry import Polygon, ScalarField, as_field, geometry_tape
from .autodiff import NonFiniteError, Jet
from .neural_net import adam_update

# ---------------------------------------------------------------------------- domains and points


@dataclass
class Domain:
    """Bounding box, strict membership test, exact boundary distance and measure."""

    lo: np.ndarray
    hi: np.ndarray
    inside: Callable[[np.ndarray], np.ndarray]
    distance: Callable[[np.ndarray], np.ndarray]
    measure: float
    vertices: np.ndarray | None = None

    def __post_init__(self):
        self.lo = np.atleast_1d(np.asarray(self.lo, float))
        self.hi = np.atleast_1d(np.asarray(self.hi, float))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def scale(self) -> float:
        return float(np.max(self.hi - self.lo))

    def closed(self, points) -> np.ndarray:
        p = np.asarray(points, float)
        return self.inside(p) | (self.distance(p) <= 1e-12)


def box_domain(lo, hi) -> Domain:
    lo = np.atleast_1d(np.asarray(lo, float))
    hi = np.atleast_1d(np.asarray(hi, float))

    def dist(p):
        return np.min(np.minimum(np.abs(p - lo), np.abs(hi - p)), axis=-1)

    def inside(p):
        return np.all((p > lo) & (p < hi), axis=-1)

    corners = None
    if len(lo) == 2:
        corners = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    return Domain(lo, hi, inside, dist, float(np.prod(hi - lo)), corners)


def polygon_domain(poly: Polygon) -> Domain:
    v = poly.vertices
    return Domain(v.min(0), v.max(0), poly.contains, poly.boundary_distance, poly.area, v)


def disk_domain(radius: float = 1.0, center=(0.0, 0.0)) -> Domain:
    c = np.asarray(center, float)

    def r(p):
        return np.hypot(p[..., 0] - c[0], p[..., 1] - c[1])

    return Domain(c - radius, c + radius, lambda p: r(p) < radius, lambda p: np.abs(radius - r(p)), np.pi * radius**2)


def annulus_domain(outer: float, inner: float, center=(0.0, 0.0)) -> Domain:
    c = np.asarray(center, float)

    def r(p):
        return np.hypot(p[..., 0] - c[0], p[..., 1] - c[1])

    return Domain(
        c - outer,
        c + outer,
        lambda p: (r(p) < outer) & (r(p) > inner),
        lambda p: np.minimum(np.abs(outer - r(p)), np.abs(r(p) - inner)),
        np.pi * (outer**2 - inner**2),
    )


@dataclass
class PointSet:
    """Interior points (uniform weights) and boundary points grouped by piece."""

    interior: np.ndarray
    measure: float
    boundary: dict = field(default_factory=dict)
    boundary_measures: dict = field(default_factory=dict)


def sample_interior(
    domain: Domain,
    n: int,
    strategy: str = "halton",
    delta_margin: float = 0.0,
    seed: int = 0,
    max_rounds: int = 200,
) -> np.ndarray:
    """``n`` points strictly inside ``domain`` and at least ``delta_margin`` from its boundary.

    ``grid`` uses a tensor grid on the box shrunk by the margin (refined until enough
    points survive, then thinned evenly); ``uniform`` and ``halton`` use rejection.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d = domain.dim
    lo, hi = domain.lo + delta_margin, domain.hi - delta_margin
    if np.any(hi < lo):
        raise ValueError("margin leaves no room for interior points")

    def keep(p):
        ok = domain.inside(p)
        if delta_margin > 0:
            ok &= domain.distance(p) >= delta_margin
        return p[ok]

    if strategy == "grid":
        k = max(int(np.ceil(n ** (1.0 / d) - 1e-9)), 1)
        for _ in range(max_rounds):
            axes = [np.linspace(a, b, k) if k > 1 else np.array([(a + b) / 2]) for a, b in zip(lo, hi)]
            mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)
            pts = keep(mesh)
            if len(pts) >= n:
                idx = np.round(np.linspace(0, len(pts) - 1, n)).astype(int)
                return pts[idx]
            k += max(1, k // 8)
        raise ValueError(f"could not place {n} grid points in the domain")

    if strategy == "uniform":
        rng = np.random.default_rng(seed)
        draw = lambda m: lo + (hi - lo) * rng.random((m, d))  # noqa: E731
    elif strategy == "halton":
        sampler = qmc.Halton(d, scramble=True, seed=seed)
        draw = lambda m: lo + (hi - lo) * sampler.random(m)  # noqa: E731
    else:
        raise ValueError(f"unknown sampling strategy {strategy!r}")
    out, count = [], 0
    for _ in range(max_rounds):
        pts = keep(draw(max(2 * n, 64)))
        out.append(pts)
        count += len(pts)
        if count >= n:
            return np.concatenate(out)[:n]
    raise ValueError(f"could not place {n} points in the domain (margin {delta_margin})")


def grid_points(lo, hi, n_per_axis: int) -> np.ndarray:
    lo, hi = np.atleast_1d(lo), np.atleast_1d(hi)
    axes = [np.linspace(a, b, n_per_axis) for a, b in zip(lo, hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(lo))


def evaluation_grid(domain: Domain, n_per_axis: int | None = None) -> np.ndarray:
    """Dense uniform grid over the closed domain (201 per axis up to 2D, 9 per axis in 4D)."""
    if n_per_axis is None:
        n_per_axis = 201 if domain.dim <= 2 else (41 if domain.dim == 3 else 9)
    g = grid_points(domain.lo, domain.hi, n_per_axis)
    return g[domain.closed(g)]


# ---------------------------------------------------------------------------- differential operators


def _batch(points) -> jnp.ndarray:
    x = jnp.asarray(points)
    return x[:, None] if x.ndim == 1 else x


def value(u, points):
    x = _batch(points)
    return jnp.broadcast_to(as_field(u)(x), x.shape[:-1])


def laplacian_op(u, points):
    return ad.laplacian(as_field(u).fn, _batch(points))


def neg_laplacian_op(u, points):
    return -ad.laplacian(as_field(u).fn, _batch(points))


def biharmonic_op(u, points):
    return ad.biharmonic(as_field(u).fn, _batch(points))


def derivatives_1d(u, points, order: int) -> list:
    """``[u, u', ..., u^(order)]`` of a one-dimensional field."""
    x = _batch(points)
    jet = ad.taylor(as_field(u).fn, x, np.ones((1, 1)), order)
    out = [jnp.broadcast_to(jet.coeffs[0], x.shape[:-1])]
    fact = 1.0
    for k in range(1, order + 1):
        fact *= k
        out.append(jnp.broadcast_to(jet.coeffs[k], (1,) + x.shape[:-1])[0] * fact)
    return out


def gradient(u, points):
    x = _batch(points)
    d = x.shape[-1]
    jet = ad.taylor(as_field(u).fn, x, np.eye(d), 1)
    return jnp.moveaxis(jnp.broadcast_to(jet.coeffs[1], (d,) + x.shape[:-1]), 0, -1)


def _targets(f, points):
    if f is None:
        return 0.0
    if isinstance(f, ScalarField) or callable(f):
        return value(f, points)
    return jnp.asarray(f)


def _check_residual(r, points):
    if isinstance(r, jax.core.Tracer):
        return
    bad = np.flatnonzero(~np.isfinite(np.asarray(r)))
    if bad.size:
        raise NonFiniteError(f"non-finite residual at point {np.asarray(points)[bad[0]].tolist()}")


# ---------------------------------------------------------------------------- losses


def collocation_loss(ansatz, residual_op: Callable, f, points) -> jnp.ndarray:
    """Mean squared interior residual ``(L u - f)^2``."""
    try:
        r = residual_op(ansatz, points) - _targets(f, points)
    except NonFiniteError:
        # locate the first offending point for the report
        for p in np.asarray(points):
            try:
                residual_op(ansatz, p[None])
            except NonFiniteError:
                raise NonFiniteError(f"non-finite residual at point {p.tolist()}") from None
        raise
    _check_residual(r, points)
    return jnp.mean(r * r)


def boundary_mse(u, pieces: Sequence) -> jnp.ndarray:
    """Sum over ``(points, data)`` pieces of the mean squared boundary mismatch."""
    total = 0.0
    for pts, g in pieces:
        r = value(u, pts) - _targets(g, pts)
        total = total + jnp.mean(r * r)
    return total


def standard_pinn_loss(net, f, residual_op: Callable, boundary_pieces: Sequence, points, w: float | None = None):
    """Interior residual plus boundary penalties; ``w`` forms a convex combination."""
    pde = collocation_loss(net, residual_op, f, points)
    bc = boundary_mse(net, boundary_pieces)
    if w is None:
        return pde + bc
    if not 0.0 <= w <= 1.0:
        raise ValueError("loss weight must lie in [0, 1]")
    return w * pde + (1.0 - w) * bc


def ritz_poisson_loss(
    ansatz,
    f,
    robin_pieces: Sequence = (),
    interior_points=None,
    measure: float = 1.0,
    point_terms: Sequence[Callable] = (),
) -> jnp.ndarray:
    """Monte Carlo energy ``|Omega| mean(|grad u|^2/2 - f u)`` plus Robin and point terms.

    ``robin_pieces`` holds ``(points, c, h, length)``; ``point_terms`` are callables of the
    trial field returning scalars (for example ``lambda u: -u(0)`` for a unit point load).
    """
    x = _batch(interior_points)
    d = x.shape[-1]
    jet = ad.taylor(as_field(ansatz).fn, x, np.eye(d), 1)
    u = jnp.broadcast_to(jet.coeffs[0], x.shape[:-1])
    g = jnp.broadcast_to(jet.coeffs[1], (d,) + x.shape[:-1])
    energy = jnp.mean(0.5 * jnp.sum(g * g, axis=0) - _targets(f, x) * u) * measure
    for pts, c, h, length in robin_pieces:
        ub = value(ansatz, pts)
        energy = energy + jnp.mean(0.5 * _targets(c, pts) * ub * ub - _targets(h, pts) * ub) * length
    for term in point_terms:
        energy = energy + term(ansatz)
    return energy


def ritz_plate_loss(ansatz, f, interior_points, measure: float = 1.0, point_terms: Sequence[Callable] = (),
                    weights=None):
    """Energy ``|Omega| mean((lap u)^2/2 - f u)`` plus optional point terms.

    With ``weights`` the integral is ``sum(weights * integrand)`` and ``measure`` is unused.
    """
    x = _batch(interior_points)
    d = x.shape[-1]
    jet = ad.taylor(as_field(ansatz).fn, x, np.eye(d), 2)
    u = jnp.broadcast_to(jet.coeffs[0], x.shape[:-1])
    lap = 2.0 * jnp.sum(jnp.broadcast_to(jet.coeffs[2], (d,) + x.shape[:-1]), axis=0)
    integrand = 0.5 * lap * lap - _targets(f, x) * u
    if weights is None:
        energy = jnp.mean(integrand) * measure
    else:
        energy = jnp.sum(jnp.asarray(weights, integrand.dtype) * integrand)
    for term in point_terms:
        energy = energy + term(ansatz)
    return energy


def disk_quadrature(n: int, radius: float = 1.0, center=(0.0, 0.0)) -> tuple[np.ndarray, np.ndarray]:
    """About ``n`` polar product nodes and weights integrating smooth functions over a disk.

    Gauss-Legendre in ``r`` (with the Jacobian ``r`` folded into the weights) times the
    periodic trapezoid rule in angle, using roughly 7 angles for every 4 radii.
    """
    if n < 6:
        raise ValueError("disk quadrature needs at least 6 nodes")
    n_r = max(2, int(round(math.sqrt(n / 1.75))))
    n_t = max(3, n // n_r)
    s, ws = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (s + 1.0)
    wr = 0.5 * radius * ws * r
    t = 2 * math.pi * (np.arange(n_t) + 0.5) / n_t
    rr, tt = np.meshgrid(r, t, indexing="ij")
    pts = np.stack([center[0] + rr * np.cos(tt), center[1] + rr * np.sin(tt)], -1).reshape(-1, 2)
    w = (wr[:, None] * np.full(n_t, 2 * math.pi / n_t)[None, :]).reshape(-1)
    return pts, w


def rayleigh_quotient(ansatz, points):
    u, du = derivatives_1d(ansatz, points, 1)
    den = jnp.sum(u * u)
    if not isinstance(den, jax.core.Tracer) and float(den) < 1e-30:
        raise ValueError("degenerate trial function: sum of u^2 below 1e-30")
    return jnp.sum(du * du) / den, jnp.mean(u * u)


def rayleigh_loss(ansatz, points):
    """Rayleigh quotient plus the normalization penalty ``(mean u^2 - 1)^2``."""
    q, m2 = rayleigh_quotient(ansatz, points)
    return q + (m2 - 1.0) ** 2


def rayleigh_frequency(ansatz, points) -> float:
    return float(jnp.sqrt(rayleigh_quotient(ansatz, points)[0]))


def _safe_norm(g):
    s = jnp.sum(g * g, axis=-1)
    pos = s > 0
    return jnp.where(pos, jnp.sqrt(jnp.where(pos, s, 1.0)), 0.0)


def eikonal_loss(ansatz, points):
    """Mean of ``(|grad u| - 1)^2``."""
    r = _safe_norm(gradient(ansatz, points)) - 1.0
    return jnp.mean(r * r)


# ---------------------------------------------------------------------------- error metrics


def _chunked(fn: Callable, points: np.ndarray, chunk: int = 4096) -> np.ndarray:
    points = np.asarray(points)
    out = []
    for i in range(0, len(points), chunk):
        out.append(np.asarray(fn(points[i : i + chunk])))
    return np.concatenate(out) if out else np.zeros(0)


def normalized_error(u_pred: Callable, u_exact: Callable, grid) -> float:
    """``||u_pred - u_exact||_2 / ||u_exact||_2`` on the grid (absolute RMS if the exact norm is 0)."""
    grid = np.asarray(grid, float)
    a = _chunked(u_pred, grid)
    b = _chunked(u_exact, grid)
    nb = np.linalg.norm(b)
    diff = np.linalg.norm(a - b)
    if nb == 0.0:
        return float(diff / np.sqrt(len(b)))
    return float(diff / nb)


# ---------------------------------------------------------------------------- training


@dataclass
class TrainConfig:
    epochs: int = 10000
    lr: float = 1e-3
    seed: int = 0
    precision: str = "f64"
    loss_kind: str = "exactbc"
    loss_weight: float | None = None
    error_every: int = 100
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.loss_weight is not None and not 0.0 <= self.loss_weight <= 1.0:
            raise ValueError("loss weight must lie in [0, 1]")
        if self.precision not in ("f32", "f64"):
            raise ValueError("precision must be f32 or f64")


@dataclass
class TrainTrace:
    epoch: list = field(default_factory=list)
    loss: list = field(default_factory=list)
    error: list = field(default_factory=list)
    seconds: float = 0.0

    def __len__(self) -> int:
        return len(self.epoch)

    @property
    def final_error(self) -> float:
        for e in reversed(self.error):
            if np.isfinite(e):
                return float(e)
        return float("nan")


@dataclass
class Objective:
    """A trainable problem: ``loss(params)``, ``predict(params, X)`` and an error measure."""

    loss: Callable
    params: Any
    predict: Callable
    exact: Callable | None = None
    grid: np.ndarray | None = None
    error: Callable | None = None

    def evaluate_error(self, params) -> float:
        if self.error is not None:
            return float(self.error(params))
        if self.exact is None or self.grid is None:
            return float("nan")
        return normalized_error(lambda X: self.predict(params, X), self.exact, self.grid)


def record_geometry(loss: Callable, params) -> list:
    """Evaluate ``loss`` once under a recording tape and return the memoized values."""

    def rec(p):
        with geometry_tape() as tape:
            loss(p)
        return tape.values

    return jax.jit(rec)(params)


def train(objective: Objective, config: TrainConfig):
    """Full-batch Adam; returns ``(trace, params)``.  Deterministic for a fixed objective."""
    values = record_geometry(objective.loss, objective.params)

    def loss_with(params, values):
        with geometry_tape(values):
            return objective.loss(params)

    vg = jax.value_and_grad(loss_with)
    lr, b1, b2, eps = config.lr, config.beta1, config.beta2, config.eps

    @jax.jit
    def step(params, m, v, k, values):
        loss, g = vg(params, values)
        ok = jnp.all(jnp.array([jnp.all(jnp.isfinite(x)) for x in jax.tree_util.tree_leaves(g)]))
        params, m, v = adam_update(params, g, m, v, k, lr, b1, b2, eps)
        return params, m, v, loss, ok

    params = objective.params
    m = jax.tree_util.tree_map(jnp.zeros_like, params)
    v = jax.tree_util.tree_map(jnp.zeros_like, params)
    trace = TrainTrace()
    t0 = time.perf_counter()
    for epoch in range(1, config.epochs + 1):
        new, m, v, loss, ok = step(params, m, v, jnp.asarray(epoch, dtype=jnp.float64), values)
        loss = float(loss)
        if not np.isfinite(loss):
            raise NonFiniteError(f"non-finite loss at epoch {epoch}")
        if not bool(ok):
            raise NonFiniteError(f"non-finite gradient at epoch {epoch}")
        params = new
        err = float("nan")
        if epoch == config.epochs or (config.error_every and epoch % config.error_every == 0):
            err = objective.evaluate_error(params)
        trace.epoch.append(epoch)
        trace.loss.append(loss)
        trace.error.append(err)
    trace.seconds = time.perf_counter() - t0
    return trace, params
