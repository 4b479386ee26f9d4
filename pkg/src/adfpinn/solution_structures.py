"""Trial functions that satisfy boundary conditions for every network parameter value.

Each structure combines ADFs, boundary data and one or two network fields into a
:class:`~adfpinn.adf_geometry.ScalarField`.  All structures are affine in the network
output, and all of them can be evaluated on jets, so their derivatives (including the
derivatives hidden inside the normal-derivative operator) are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import jax.numpy as jnp
import numpy as np

from . import autodiff as ad
from .adf_geometry import ScalarField, as_field, transfinite_interpolant
from .autodiff import primal


@dataclass(frozen=True)
class BoundaryPiece:
    """One boundary piece: its ADF and either Dirichlet data ``g`` or Robin data ``c, h``."""

    adf: ScalarField
    kind: str = "dirichlet"
    g: object = 0.0
    c: object = 0.0
    h: object = 0.0
    mu: int | None = None

    def __post_init__(self):
        if self.kind not in ("dirichlet", "robin"):
            raise ValueError("kind must be 'dirichlet' or 'robin'")

    @property
    def exponent(self) -> int:
        if self.mu is not None:
            return self.mu
        return 1 if self.kind == "dirichlet" else 2


def dirichlet_data(pieces: Sequence[BoundaryPiece]) -> ScalarField:
    """Transfinite blend of the Dirichlet data of the given pieces."""
    ds = [p for p in pieces if p.kind == "dirichlet"]
    if len(ds) == 1:
        return as_field(ds[0].g)
    return transfinite_interpolant([(p.adf, p.g, p.exponent) for p in ds])


def d1_field(phi, v, frozen_at=None) -> ScalarField:
    """The field ``-grad(phi) . grad(v)``.

    With ``frozen_at`` the gradient of ``v`` is taken at that fixed boundary point instead
    of at the evaluation point, which is only meaningful when the boundary piece is a
    single point (one-dimensional problems).
    """
    phi, v = as_field(phi), as_field(v)

    def fn(xs):
        gp = ad.partials(phi.fn, xs)
        if frozen_at is None:
            gv = ad.partials(v.fn, xs)
        else:
            shape = jnp.shape(primal(xs[0]))
            xb = [jnp.full(shape, float(c)) for c in np.atleast_1d(np.asarray(frozen_at, float))]
            gv = ad.partials(v.fn, xb)
        out = gp[0] * gv[0]
        for a, b in zip(gp[1:], gv[1:]):
            out = out + a * b
        return -out

    return ScalarField(fn, "D1")


def dirichlet_structure(g, phi, net) -> ScalarField:
    """``g + phi * net``: equals ``g`` wherever ``phi`` vanishes."""
    return as_field(g) + as_field(phi) * as_field(net)


def robin_structure(c, h, phi, net1, net2) -> ScalarField:
    """``[1 + phi (c + D1)](net1) - phi h + phi^2 net2``: imposes ``du/dn + c u = h``."""
    c, h, phi, n1, n2 = map(as_field, (c, h, phi, net1, net2))
    return n1 + phi * (c * n1 + d1_field(phi, n1)) - phi * h + phi * phi * n2


def neumann_structure(h, phi, net1, net2) -> ScalarField:
    """``[1 + phi D1](net1) - phi h + phi^2 net2``: imposes ``du/dn = h``."""
    h, phi, n1, n2 = map(as_field, (h, phi, net1, net2))
    return n1 + phi * d1_field(phi, n1) - phi * h + phi * phi * n2


def _safe_ratio(num, den):
    zero = primal(den) == 0
    return ad.where(zero, 0.0, num / ad.where(zero, 1.0, den))


def mixed_structure_I(g, c, h, phi1, phi2, net, frozen_at=None) -> ScalarField:
    """Dirichlet ``g`` on the zero set of ``phi1``, Robin ``(c, h)`` on that of ``phi2``.

    A single network is shared by the Dirichlet and Robin corrections, joined through
    ``phi = phi1 phi2 / (phi1 + phi2)``.
    """
    g, c, h, phi1, phi2, net = map(as_field, (g, c, h, phi1, phi2, net))
    phi = ScalarField(lambda xs: _safe_ratio(phi1.fn(xs) * phi2.fn(xs), phi1.fn(xs) + phi2.fn(xs)), "phi12")
    inner = (
        (phi2 + c * phi1) * net
        + d1_field(phi2, phi1 * net, frozen_at)
        + d1_field(phi2, g, frozen_at)
        + c * g
        - h
    )
    return phi1 * net + phi * inner + g


def mixed_structure_II(g, c, h, phi1, phi2, net) -> ScalarField:
    """Transfinite blend of ``g`` (on ``phi1 = 0``) and a Robin trial (on ``phi2 = 0``).

    The Robin piece enters squared so the blend keeps its normal derivative.
    """
    g, c, h, phi1, phi2, net = map(as_field, (g, c, h, phi1, phi2, net))
    u2 = net + phi2 * (c * net + d1_field(phi2, net)) - phi2 * h

    def fn(xs):
        p1, p2 = phi1.fn(xs), phi2.fn(xs)
        q = p2 * p2
        den = p1 + q
        zero = primal(den) == 0
        safe = ad.where(zero, 1.0, den)
        w1 = ad.where(zero, 0.0, p1 / safe)
        w2 = ad.where(zero, 1.0, q / safe)
        n = net.fn(xs)
        out = w1 * u2.fn(xs) + w2 * g.fn(xs) + p1 * q * n
        # on the Dirichlet piece the blend is exactly g
        return ad.where(primal(p1) == 0, g.fn(xs), out)

    return ScalarField(fn, "mixed_II")


def clamped_plate_structure(phi, net) -> ScalarField:
    """``phi^2 net``: value and normal derivative vanish on the zero set of ``phi``."""
    phi = as_field(phi)
    return phi * phi * as_field(net)
