"""Input-space derivatives by truncated Taylor arithmetic, parameter gradients by JAX.

A :class:`Jet` carries the Taylor coefficients ``c_k = f^(k)/k!`` of a quantity along a
seeded input direction, so ``f(x + t v) = sum_k c_k t^k``.  Several seed directions are
carried at once on the leading axis of the coefficients ``c_1..c_K``; ``c_0`` has no such
axis and simply broadcasts.  Coefficients may themselves be jets, which is how gradients
of fields (for example ``-grad(phi) . grad(v)``) are differentiated again inside a
Laplacian.

Everything is built from ``jax.numpy`` primitives, so reverse-mode differentiation with
respect to network parameters goes straight through the jet arithmetic.
"""

from __future__ import annotations

from math import factorial
from typing import Any, Callable, Sequence

import jax
import jax.flatten_util
import jax.numpy as jnp
import numpy as np

Array = Any


class NonFiniteError(FloatingPointError):
    """Raised when a derivative or gradient contains NaN or infinity."""


def _is_jet(x) -> bool:
    return isinstance(x, Jet)


def primal(x):
    """Innermost value of a (possibly nested) jet."""
    while isinstance(x, Jet):
        x = x.coeffs[0]
    return x


def _cauchy(a: Sequence, b: Sequence, order: int) -> list:
    out = []
    for k in range(order + 1):
        acc = None
        for j in range(k + 1):
            if a[j] is None or b[k - j] is None:
                continue
            term = a[j] * b[k - j]
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def _compose(x: "Jet", derivs: Sequence) -> "Jet":
    """Apply a scalar function given ``derivs[j] = f^(j)(x0)/j!`` to a jet."""
    order = x.order
    delta = [None] + list(x.coeffs[1:])
    out = [derivs[0]] + [None] * order
    power = delta
    for j in range(1, order + 1):
        for k in range(j, order + 1):
            if power[k] is None or derivs[j] is None:
                continue
            term = derivs[j] * power[k]
            out[k] = term if out[k] is None else out[k] + term
        if j < order:
            power = _cauchy(power, delta, order)
    zero = derivs[0] * 0.0
    return Jet([zero if c is None else c for c in out])


class Jet:
    """Truncated Taylor polynomial in one seeded direction per leading-axis slot."""

    __slots__ = ("coeffs",)
    __array_priority__ = 1000

    def __init__(self, coeffs: Sequence):
        self.coeffs = tuple(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, value={primal(self)!r})"

    # arithmetic
    def __add__(self, other):
        if _is_jet(other):
            n = min(self.order, other.order)
            return Jet([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])
        return Jet((self.coeffs[0] + other,) + self.coeffs[1:])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_jet(other):
            n = min(self.order, other.order)
            return Jet(_cauchy(self.coeffs, other.coeffs, n))
        return Jet([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_jet(other):
            return self * (1.0 / other)
        n = min(self.order, other.order)
        inv = 1.0 / other.coeffs[0]
        out = [self.coeffs[0] * inv]
        for k in range(1, n + 1):
            acc = self.coeffs[k]
            for j in range(1, k + 1):
                acc = acc - other.coeffs[j] * out[k - j]
            out.append(acc * inv)
        return Jet(out)

    def __rtruediv__(self, other):
        n = self.order
        inv = 1.0 / self.coeffs[0]
        out = [other * inv]
        for k in range(1, n + 1):
            acc = None
            for j in range(1, k + 1):
                term = self.coeffs[j] * out[k - j]
                acc = term if acc is None else acc + term
            out.append(-acc * inv)
        return Jet(out)

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            if p == 0:
                return self * 0.0 + 1.0
            result = None
            base = self
            while p:
                if p & 1:
                    result = base if result is None else result * base
                p >>= 1
                if p:
                    base = base * base
            return result
        return power(self, p)

    def __matmul__(self, w):
        return Jet([c @ w for c in self.coeffs])

    def __getitem__(self, idx):
        return Jet([c[idx] for c in self.coeffs])

    def sum(self, axis=-1):
        if isinstance(axis, int) and axis >= 0:
            raise ValueError("jets only reduce over negative (trailing) axes")
        return Jet([c.sum(axis=axis) for c in self.coeffs])

    # comparisons act on the innermost value and return plain boolean arrays
    def __gt__(self, other):
        return primal(self) > primal(other)

    def __ge__(self, other):
        return primal(self) >= primal(other)

    def __lt__(self, other):
        return primal(self) < primal(other)

    def __le__(self, other):
        return primal(self) <= primal(other)


jax.tree_util.register_pytree_node(
    Jet, lambda j: (j.coeffs, None), lambda _, c: Jet(c)
)


# ---------------------------------------------------------------- elementary functions

def exp(x):
    if _is_jet(x):
        e = exp(x.coeffs[0])
        return _compose(x, [e * (1.0 / factorial(j)) for j in range(x.order + 1)])
    return jnp.exp(x)


def log(x):
    if _is_jet(x):
        x0 = x.coeffs[0]
        inv = 1.0 / x0
        derivs = [log(x0)]
        p = inv
        for j in range(1, x.order + 1):
            derivs.append(p * ((-1.0) ** (j + 1) / j))
            p = p * inv
        return _compose(x, derivs)
    return jnp.log(x)


def power(x, p: float):
    """``x**p`` for real ``p``; derivatives assume ``x > 0`` unless ``p`` is a whole number."""
    if _is_jet(x):
        x0 = x.coeffs[0]
        y0 = power(x0, p)
        inv = 1.0 / x0
        derivs = [y0]
        coef = 1.0
        term = y0
        for j in range(1, x.order + 1):
            coef *= (p - j + 1) / j
            term = term * inv
            derivs.append(term * coef)
        return _compose(x, derivs)
    return jnp.power(x, p)


def sqrt(x):
    if _is_jet(x):
        return power(x, 0.5)
    return jnp.sqrt(x)


def square(x):
    return x * x


def tanh(x):
    if _is_jet(x):
        t = tanh(x.coeffs[0])
        s = 1.0 - t * t
        d = [t, s]
        if x.order >= 2:
            d.append(-t * s)  # f''/2
        if x.order >= 3:
            d.append(s * (3.0 * t * t - 1.0) * (1.0 / 3.0))
        if x.order >= 4:
            d.append(t * s * (2.0 - 3.0 * t * t) * (1.0 / 3.0))
        return _compose(x, d[: x.order + 1])
    return _tanh(x)


def _tanh(x):
    # XLA's double-precision tanh is roughly ten times slower than exp on CPU
    x = jnp.asarray(x)
    if x.dtype != jnp.float64:
        return jnp.tanh(x)
    a = jnp.minimum(jnp.abs(x), 20.0)
    return jnp.sign(x) * (1.0 - 2.0 / (jnp.exp(2.0 * a) + 1.0))


def sin(x):
    if _is_jet(x):
        s, c = sin(x.coeffs[0]), cos(x.coeffs[0])
        cycle = [s, c, -s, -c]
        return _compose(x, [cycle[j % 4] * (1.0 / factorial(j)) for j in range(x.order + 1)])
    return jnp.sin(x)


def cos(x):
    if _is_jet(x):
        s, c = sin(x.coeffs[0]), cos(x.coeffs[0])
        cycle = [c, -s, -c, s]
        return _compose(x, [cycle[j % 4] * (1.0 / factorial(j)) for j in range(x.order + 1)])
    return jnp.cos(x)


def where(cond, a, b):
    """Coefficient-wise select; ``cond`` must be a plain boolean array."""
    if _is_jet(a) or _is_jet(b):
        n = max(a.order if _is_jet(a) else 0, b.order if _is_jet(b) else 0)
        ca = _lift(a, n).coeffs
        cb = _lift(b, n).coeffs
        return Jet([where(cond, u, v) for u, v in zip(ca, cb)])
    return jnp.where(cond, a, b)


def _lift(a, order: int) -> "Jet":
    if _is_jet(a):
        if a.order >= order:
            return Jet(a.coeffs[: order + 1])
        zero = a.coeffs[0] * 0.0
        return Jet(a.coeffs + (zero,) * (order - a.order))
    zero = a * 0.0
    return Jet((a,) + (zero,) * order)


def relu(x):
    """max(0, x) with derivative 0 at the kink."""
    return where(primal(x) > 0, x, 0.0)


def repu(x, k: int = 3):
    """max(0, x)**k with all derivatives taken as 0 at the kink."""
    if _is_jet(x):
        x0 = x.coeffs[0]
        r = relu(x0)
        derivs = []
        for j in range(x.order + 1):
            if j > k:
                derivs.append(r * 0.0)
                continue
            c = factorial(k) / (factorial(k - j) * factorial(j))
            if j == k:
                derivs.append(where(primal(x0) > 0, r * 0.0 + 1.0, r * 0.0))
            else:
                derivs.append(r ** (k - j) * c)
        return _compose(x, derivs)
    r = jnp.maximum(x, 0.0)
    return r**k


def gaussian(x):
    return exp(-(x * x))


def stack(items: Sequence, axis: int = -1):
    """Stack scalars or jets along a new trailing axis (jets broadcast coefficient-wise)."""
    if not any(_is_jet(i) for i in items):
        arrays = jnp.broadcast_arrays(*[jnp.asarray(i) for i in items])
        return jnp.stack(arrays, axis=axis)
    n = max(i.order for i in items if _is_jet(i))
    lifted = [_lift(i, n) for i in items]
    return Jet([stack([l.coeffs[k] for l in lifted], axis) for k in range(n + 1)])


# ---------------------------------------------------------------- seeding and operators

def _as_points(x) -> jnp.ndarray:
    x = jnp.asarray(x)
    if x.ndim == 0:
        x = x[None]
    return x


def seed(points, directions, order: int) -> list:
    """Coordinate jets for ``points[..., d]`` seeded along ``directions[D, d]``."""
    points = _as_points(points)
    directions = jnp.asarray(directions, dtype=points.dtype)
    d = points.shape[-1]
    if directions.shape[-1] != d:
        raise ValueError(f"direction dimension {directions.shape[-1]} != point dimension {d}")
    extra = (1,) * (points.ndim - 1)
    coords = []
    for i in range(d):
        c0 = points[..., i]
        c1 = directions[:, i].reshape((-1,) + extra)
        zero = jnp.zeros((1,) * (c1.ndim), dtype=points.dtype)
        coords.append(Jet([c0, c1] + [zero] * (order - 1)))
    return coords


def taylor(field: Callable, points, directions, order: int) -> Jet:
    """Taylor coefficients of ``field`` at each point along each direction."""
    out = field(seed(points, directions, order))
    if not _is_jet(out):
        out = _lift(jnp.broadcast_to(out, jnp.shape(points)[:-1]), order)
    return out


def _coeff(jet: Jet, k: int, shape) -> jnp.ndarray:
    return jnp.broadcast_to(jet.coeffs[k], shape)


def _check(x, what: str):
    if isinstance(x, jax.core.Tracer):
        return x
    if not bool(jnp.all(jnp.isfinite(x))):
        raise NonFiniteError(f"non-finite {what}")
    return x


def grad_input(field: Callable, points) -> jnp.ndarray:
    """Gradient ``[..., d]`` of a scalar field at ``points[..., d]``."""
    points = _as_points(points)
    d = points.shape[-1]
    jet = taylor(field, points, jnp.eye(d), 1)
    c1 = _coeff(jet, 1, (d,) + points.shape[:-1])
    return _check(jnp.moveaxis(c1, 0, -1), "gradient")


def directional_derivative(field: Callable, points, direction, k: int) -> jnp.ndarray:
    """k-th derivative along an (unnormalized) direction."""
    points = _as_points(points)
    jet = taylor(field, points, jnp.asarray(direction)[None, :], k)
    return _check(_coeff(jet, k, (1,) + points.shape[:-1])[0] * factorial(k), "derivative")


def laplacian(field: Callable, points) -> jnp.ndarray:
    points = _as_points(points)
    d = points.shape[-1]
    jet = taylor(field, points, jnp.eye(d), 2)
    return _check(2.0 * _coeff(jet, 2, (d,) + points.shape[:-1]).sum(axis=0), "laplacian")


BIHARMONIC_DIRECTIONS = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]])


def biharmonic_from_jet(jet: Jet, batch_shape) -> jnp.ndarray:
    """Combine fourth-order coefficients along :data:`BIHARMONIC_DIRECTIONS`.

    Polarization gives ``2 u_xxyy = (D4_(1,1) + D4_(1,-1))/12 - (u_xxxx + u_yyyy)/3``.
    """
    d4 = 24.0 * _coeff(jet, 4, (4,) + tuple(batch_shape))
    return (d4[2] + d4[3]) / 6.0 + (2.0 / 3.0) * (d4[0] + d4[1])


def biharmonic(field: Callable, points) -> jnp.ndarray:
    points = _as_points(points)
    if points.shape[-1] != 2:
        raise ValueError("biharmonic is implemented for two-dimensional fields")
    jet = taylor(field, points, BIHARMONIC_DIRECTIONS, 4)
    return _check(biharmonic_from_jet(jet, points.shape[:-1]), "biharmonic")


def partials(field: Callable, coords: Sequence) -> list:
    """Partial derivatives of ``field`` at ``coords`` (plain arrays or jets).

    Each partial is obtained with a first-order jet whose value slot holds the incoming
    coordinate, so the result can itself be differentiated by the outer jet.
    """
    out = []
    for i in range(len(coords)):
        inner = []
        for j, c in enumerate(coords):
            base = jnp.ones_like(primal(c)) if i == j else jnp.zeros_like(primal(c))
            inner.append(Jet((c, base)))
        y = field(inner)
        out.append(y.coeffs[1] if _is_jet(y) else jnp.zeros_like(primal(coords[0])))
    return out


# ---------------------------------------------------------------- parameter gradients

def _first_bad_index(tree) -> int | None:
    flat, _ = jax.flatten_util.ravel_pytree(tree)
    bad = np.flatnonzero(~np.isfinite(np.asarray(flat)))
    return int(bad[0]) if bad.size else None


def param_gradient(loss: Callable, theta):
    """Gradient of a scalar ``loss(theta)``; raises on non-finite components."""
    g = jax.grad(loss)(theta)
    bad = _first_bad_index(g)
    if bad is not None:
        raise NonFiniteError(f"non-finite gradient component at parameter index {bad}")
    return g


class ParamTape:
    """Recorded forward pass of ``loss`` at ``theta`` that can be pulled back once or more."""

    def __init__(self, loss: Callable, theta):
        self.value, self._pullback = jax.vjp(loss, theta)

    def gradient(self):
        (g,) = self._pullback(jnp.ones_like(self.value))
        bad = _first_bad_index(g)
        if bad is not None:
            raise NonFiniteError(f"non-finite gradient component at parameter index {bad}")
        return g

