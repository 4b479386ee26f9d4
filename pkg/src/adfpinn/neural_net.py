"""Multilayer perceptrons, a fixed-center Gaussian RBF network, and Adam."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import jax
import jax.numpy as jnp
import numpy as np
from jax.flatten_util import ravel_pytree

from . import autodiff as ad
from .autodiff import NonFiniteError

ACTIVATIONS: dict[str, Callable] = {
    "tanh": ad.tanh,
    "relu": ad.relu,
    "repu3": lambda z: ad.repu(z, 3),
    "gaussian": ad.gaussian,
}

CHECKPOINT_HEADER = "adfpinn-mlp 1"


def _coords(x) -> list:
    if isinstance(x, (list, tuple)):
        return list(x)
    x = jnp.asarray(x)
    return [x[..., i] for i in range(x.shape[-1])]


@dataclass
class Mlp:
    """Widths ``[d, N_1, ..., N_L, 1]``; ``params`` holds ``(W, b)`` with ``W`` of shape (out, in)."""

    widths: list[int]
    activation: str
    params: list = field(repr=False)

    @property
    def num_params(self) -> int:
        return param_count(self.widths)

    def __call__(self, x, params=None):
        return forward(self, x, params)

    def flat(self) -> np.ndarray:
        return np.asarray(ravel_pytree(self.params)[0])

    def with_flat(self, theta) -> "Mlp":
        _, unravel = ravel_pytree(self.params)
        return Mlp(list(self.widths), self.activation, unravel(jnp.asarray(theta)))


def param_count(widths) -> int:
    return int(sum(n * (m + 1) for m, n in zip(widths[:-1], widths[1:])))


def init_mlp(widths, activation: str = "tanh", seed: int = 0, dtype=jnp.float64) -> Mlp:
    """Glorot-uniform weights and zero biases, reproducible from ``seed``."""
    widths = [int(w) for w in widths]
    if len(widths) < 3:
        raise ValueError("an MLP needs at least one hidden layer")
    if any(w < 1 for w in widths) or widths[-1] != 1:
        raise ValueError("widths must be positive and end in a single output")
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    rng = np.random.Generator(np.random.PCG64(np.uint64(seed % 2**64)))
    params = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-lim, lim, size=(fan_out, fan_in))
        params.append((jnp.asarray(W, dtype), jnp.zeros(fan_out, dtype)))
    return Mlp(widths, activation, params)


def mlp_apply(params, x, activation: str = "tanh"):
    """Evaluate the network on points ``[..., d]`` or a list of (jet) coordinates."""
    act = ACTIVATIONS[activation]
    xs = _coords(x)
    if len(xs) != params[0][0].shape[1]:
        raise ValueError(f"network expects {params[0][0].shape[1]} inputs, got {len(xs)}")
    h = ad.stack(xs)
    for W, b in params[:-1]:
        h = act(h @ W.T + b)
    W, b = params[-1]
    return (h @ W.T + b)[..., 0]


def forward(net: Mlp, x, params=None):
    return mlp_apply(net.params if params is None else params, x, net.activation)


@dataclass
class RbfNet:
    """``u(x) = sum_i c_i exp(-(s_i (x - b_i))^2)`` with fixed centers ``b_i``.

    Only the widths ``s_i`` and output weights ``c_i`` are parameters.
    """

    centers: np.ndarray
    params: dict = field(repr=False)

    def __post_init__(self):
        self.centers = np.array(self.centers, dtype=float)
        self.centers.setflags(write=False)

    @property
    def num_params(self) -> int:
        return 2 * len(self.centers)

    def __call__(self, x, params=None):
        return rbf_apply(self.params if params is None else params, x, self.centers)


def init_rbf(centers, seed: int = 0, dtype=jnp.float64) -> RbfNet:
    """Widths start at the inverse center spacing; output weights are small and random."""
    c = np.asarray(centers, float)
    spacing = np.min(np.diff(np.sort(c))) if len(c) > 1 else 1.0
    rng = np.random.Generator(np.random.PCG64(np.uint64(seed % 2**64)))
    lim = np.sqrt(6.0 / (len(c) + 1))
    params = {
        "width": jnp.full(len(c), 1.0 / spacing, dtype),
        "weight": jnp.asarray(rng.uniform(-lim, lim, len(c)), dtype),
    }
    return RbfNet(c, params)


def rbf_apply(params, x, centers):
    xs = _coords(x)
    z = (xs[0][..., None] - jnp.asarray(centers)) * params["width"]
    return (ad.gaussian(z) * params["weight"]).sum(axis=-1)


# ---------------------------------------------------------------------------- Adam


@dataclass
class AdamState:
    m: Any
    v: Any
    step: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(theta, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    zeros = jax.tree_util.tree_map(jnp.zeros_like, theta)
    return AdamState(zeros, zeros, 0, lr, beta1, beta2, eps)


def adam_update(theta, grad, m, v, step, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected Adam update; pure, so it can live inside ``jax.jit``.

    ``step`` is the index of this update starting from 1.
    """
    m = jax.tree_util.tree_map(lambda a, g: beta1 * a + (1 - beta1) * g, m, grad)
    v = jax.tree_util.tree_map(lambda a, g: beta2 * a + (1 - beta2) * g * g, v, grad)
    c1 = 1 - beta1**step
    c2 = 1 - beta2**step
    theta = jax.tree_util.tree_map(
        lambda p, a, b: p - lr * (a / c1) / (jnp.sqrt(b / c2) + eps), theta, m, v
    )
    return theta, m, v


def adam_step(state: AdamState, theta, grad):
    """Return ``(theta, state)`` after one step; a non-finite gradient aborts the step."""
    flat, _ = ravel_pytree(grad)
    bad = np.flatnonzero(~np.isfinite(np.asarray(flat)))
    if bad.size:
        raise NonFiniteError(f"non-finite gradient at parameter index {int(bad[0])}; step aborted")
    step = state.step + 1
    theta, m, v = adam_update(theta, grad, state.m, state.v, step, state.lr, state.beta1, state.beta2, state.eps)
    return theta, AdamState(m, v, step, state.lr, state.beta1, state.beta2, state.eps)


# ---------------------------------------------------------------------------- checkpoints


def save_checkpoint(net: Mlp, path) -> None:
    """Text checkpoint: header, widths, activation, then one parameter per line in layer order."""
    lines = [CHECKPOINT_HEADER, " ".join(str(w) for w in net.widths), net.activation]
    lines += [repr(float(t)) for t in net.flat()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_checkpoint(path) -> Mlp:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CHECKPOINT_HEADER:
        raise ValueError(f"{path}: not a checkpoint (expected header {CHECKPOINT_HEADER!r})")
    widths = [int(w) for w in lines[1].split()]
    net = init_mlp(widths, lines[2], 0)
    theta = np.array([float(s) for s in lines[3:]])
    if theta.size != net.num_params:
        raise ValueError(f"{path}: expected {net.num_params} parameters, found {theta.size}")
    return net.with_flat(theta)
