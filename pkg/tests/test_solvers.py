import math

import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adfpinn import adf_geometry as g
from adfpinn import autodiff as ad
from adfpinn import solvers as sv
from adfpinn.adf_geometry import ScalarField, coordinate, constant
from adfpinn.neural_net import init_mlp, mlp_apply

X, Y = coordinate(0), coordinate(1)


def field(fn, name="u"):
    return ScalarField(fn, name)


# ---------------------------------------------------------------- sampling

def test_grid_sampling_unit_square():
    pts = sv.sample_interior(sv.box_domain([0, 0], [1, 1]), 100, "grid", 0.01, 0)
    assert pts.shape == (100, 2)
    assert np.all(pts >= 0.01 - 1e-15) and np.all(pts <= 0.99 + 1e-15)
    assert np.allclose(np.unique(pts[:, 0]), np.linspace(0.01, 0.99, 10))


@pytest.mark.parametrize("strategy", ["grid", "uniform", "halton"])
def test_sampling_is_deterministic(strategy):
    dom = sv.polygon_domain(g.l_shape())
    a = sv.sample_interior(dom, 300, strategy, 0.02, 7)
    b = sv.sample_interior(dom, 300, strategy, 0.02, 7)
    assert np.array_equal(a, b)
    assert len(a) == 300


@pytest.mark.parametrize("strategy", ["grid", "uniform", "halton"])
def test_annulus_sampling_membership(strategy):
    pts = sv.sample_interior(sv.annulus_domain(1.0, 0.25), 500, strategy, 0.0, 1)
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert np.all((r > 0.25) & (r < 1.0))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 400), st.floats(0.0, 0.2), st.integers(0, 10_000))
def test_margin_is_respected(n, margin, seed):
    ls = g.l_shape()
    pts = sv.sample_interior(sv.polygon_domain(ls), n, "uniform", margin, seed)
    assert len(pts) == n
    assert np.all(ls.contains(pts))
    assert np.all(ls.boundary_distance(pts) >= margin)
    assert np.all(np.min(np.linalg.norm(pts[:, None] - ls.vertices[None], axis=-1), axis=1) >= margin)


def test_sampling_errors():
    dom = sv.box_domain([0, 0], [1, 1])
    with pytest.raises(ValueError):
        sv.sample_interior(dom, 0)
    with pytest.raises(ValueError):
        sv.sample_interior(dom, 10, "grid", 0.6)
    with pytest.raises(ValueError):
        sv.sample_interior(dom, 10, "sobol")


def test_evaluation_grid_sizes():
    assert sv.evaluation_grid(sv.box_domain([0], [1])).shape == (201, 1)
    assert sv.evaluation_grid(sv.box_domain([0, 0], [1, 1])).shape == (201 * 201, 2)
    assert sv.evaluation_grid(sv.box_domain([-1] * 4, [1] * 4)).shape == (9**4, 4)
    disk = sv.evaluation_grid(sv.disk_domain(1.0))
    assert np.all(np.hypot(disk[:, 0], disk[:, 1]) <= 1.0 + 1e-12)


# ---------------------------------------------------------------- collocation losses

def rod1_exact():
    # -u'' = 1 - 2x + 10x^2 on (0, 1), u(0) = 1/2, u(1) = -1/2
    # the linear term cancels: u(1) = 1/2 - 1/2 + 1/3 - 5/6 = -1/2
    def u(xs):
        x = xs[0]
        return 0.5 - x * x / 2 + x**3 / 3 - 10 * x**4 / 12

    return field(u), field(lambda xs: 1 - 2 * xs[0] + 10 * xs[0] ** 2, "b")


def test_collocation_zero_for_exact_solution():
    u, b = rod1_exact()
    pts = np.linspace(0.01, 0.99, 100)[:, None]
    assert float(u(jnp.array([[1.0]]))[0]) == pytest.approx(-0.5)
    assert float(sv.collocation_loss(u, sv.neg_laplacian_op, b, pts)) <= 1e-18


def test_collocation_zero_ansatz_unit_forcing():
    pts = np.linspace(0.05, 0.95, 10)[:, None]
    assert float(sv.collocation_loss(constant(0.0), sv.neg_laplacian_op, 1.0, pts)) == pytest.approx(1.0)


def test_collocation_nonfinite_names_point():
    u = field(lambda xs: ad.sqrt(xs[0]))
    with pytest.raises(ad.NonFiniteError, match="point"):
        sv.collocation_loss(u, sv.neg_laplacian_op, 0.0, np.array([[0.5], [0.0]]))


def test_heat_loss_at_initialization_is_positive():
    net = init_mlp([2, 50, 50, 1], "tanh", 42)
    phi = g.polygon_adf_req(g.rectangle(-1, -1, 1, 1))
    u = phi * field(lambda xs: mlp_apply(net.params, xs, "tanh"))
    f = field(lambda xs: ad.sin(math.pi * xs[0]) * ad.sin(math.pi * xs[1]))
    pts = sv.sample_interior(sv.box_domain([-1, -1], [1, 1]), 200, "halton", 0.02, 0)
    loss = float(sv.collocation_loss(u, sv.neg_laplacian_op, f, pts))
    assert math.isfinite(loss) and loss > 0


def test_standard_loss_properties():
    u, b = rod1_exact()
    pts = np.linspace(0.01, 0.99, 50)[:, None]
    pieces = [(np.array([[0.0]]), 0.5), (np.array([[1.0]]), -0.5)]
    assert float(sv.standard_pinn_loss(u, b, sv.neg_laplacian_op, pieces, pts)) <= 1e-18
    wrong = u + 0.1
    pde = float(sv.collocation_loss(wrong, sv.neg_laplacian_op, b, pts))
    bc = float(sv.boundary_mse(wrong, pieces))
    assert bc == pytest.approx(2 * 0.01)
    assert float(sv.standard_pinn_loss(wrong, b, sv.neg_laplacian_op, pieces, pts, 1.0)) == pytest.approx(pde)
    w01 = float(sv.standard_pinn_loss(wrong, b, sv.neg_laplacian_op, pieces, pts, 0.1))
    assert w01 == pytest.approx(0.1 * pde + 0.9 * bc)
    assert float(sv.standard_pinn_loss(wrong, b, sv.neg_laplacian_op, pieces, pts)) == pytest.approx(pde + bc)


# ---------------------------------------------------------------- energies

def test_ritz_zero():
    pts = np.linspace(0.0, 1.0, 20)[:, None]
    assert float(sv.ritz_poisson_loss(constant(0.0), 0.0, (), pts, 1.0)) == 0.0
    assert float(sv.ritz_plate_loss(constant(0.0), 1.0, np.zeros((5, 2)), math.pi)) == 0.0


def test_ritz_point_load_energy_of_exact_solution():
    # u = 1 + x on (-1, 0) and 1 on (0, 1): energy 1/2 * 1 - u(0) = -1/2
    u = field(lambda xs: ad.where(ad.primal(xs[0]) < 0, 1 + xs[0], 1.0 + 0 * xs[0]))
    pts = ((np.arange(2000) + 0.5) / 1000 - 1)[:, None]
    work = lambda v: -sv.value(v, np.array([[0.0]]))[0]  # noqa: E731
    assert float(sv.ritz_poisson_loss(u, 0.0, (), pts, 2.0, [work])) == pytest.approx(-0.5, rel=1e-12)


def test_ritz_constant_load_matches_closed_form():
    # -u'' = 1, u(0) = u(1) = 0: u = x(1-x)/2, energy = -1/24
    u = X * (1 - X) / 2
    pts = np.linspace(0.001, 0.999, 500)[:, None]
    assert float(sv.ritz_poisson_loss(u, 1.0, (), pts, 1.0)) == pytest.approx(-1 / 24, rel=0.02)


def test_ritz_robin_term():
    u = constant(2.0)
    pieces = [(np.array([[1.0, 0.0], [0.0, 1.0]]), 3.0, 1.0, 0.5)]
    # 0.5 * (1/2 * 3 * 4 - 1 * 2) = 2
    assert float(sv.ritz_poisson_loss(u, 0.0, pieces, np.zeros((4, 2)), 1.0)) == pytest.approx(2.0)


def test_plate_energy_matches_dense_quadrature():
    u = field(lambda xs: (1 - xs[0] ** 2 - xs[1] ** 2) ** 2 / 64)
    pts = sv.sample_interior(sv.disk_domain(1.0), 10000, "halton", 0.0, 0)
    energy = float(sv.ritz_plate_loss(u, 1.0, pts, math.pi))
    # polar midpoint rule: lap u = (4 r^2 - 2)/16
    r = (np.arange(4000) + 0.5) / 4000
    integrand = 0.5 * ((4 * r**2 - 2) / 16) ** 2 - (1 - r**2) ** 2 / 64
    oracle = 2 * math.pi * np.sum(integrand * r) / 4000
    assert oracle == pytest.approx(-math.pi / 384, rel=1e-6)
    assert energy == pytest.approx(oracle, rel=0.01)
    pts, w = sv.disk_quadrature(2800)
    assert float(sv.ritz_plate_loss(u, 1.0, pts, weights=w)) == pytest.approx(-math.pi / 384, rel=1e-12)


def test_disk_quadrature_layout_and_moments():
    pts, w = sv.disk_quadrature(2800, 2.0, (1.0, -1.0))
    assert pts.shape == (2800, 2) and w.shape == (2800,)
    assert np.all(w > 0)
    rel = pts - np.array([1.0, -1.0])
    assert np.max(np.hypot(*rel.T)) < 2.0
    assert w.sum() == pytest.approx(4 * math.pi, rel=1e-13)
    # int r^4 cos^2 over a disk of radius 2 is pi * 2^6 / 6
    assert np.sum(w * np.sum(rel**2, 1) ** 2 * np.cos(np.arctan2(rel[:, 1], rel[:, 0])) ** 2) == pytest.approx(
        math.pi * 64 / 6, rel=1e-12)
    with pytest.raises(ValueError, match="at least"):
        sv.disk_quadrature(3)


def test_beam_energy_includes_point_moment():
    v = X * X
    pts = ((np.arange(1000) + 0.5) / 1000)[:, None]
    moment = lambda w: sv.derivatives_1d(w, np.array([[0.5]]), 1)[1][0]  # noqa: E731
    # v'' = 2 -> 1/2 * 4 = 2, plus v'(1/2) = 1
    assert float(sv.ritz_plate_loss(v, 0.0, pts, 1.0, [moment])) == pytest.approx(3.0)


def test_rayleigh_examples():
    pts = ((np.arange(4000) + 0.5) / 4000)[:, None]
    mode = field(lambda xs: ad.sin(math.pi * xs[0]) * math.sqrt(2))
    assert float(sv.rayleigh_loss(mode, pts)) == pytest.approx(math.pi**2, rel=1e-6)
    doubled = field(lambda xs: 2 * ad.sin(math.pi * xs[0]))
    q, m2 = sv.rayleigh_quotient(doubled, pts)
    assert float(q) == pytest.approx(math.pi**2, rel=1e-6)
    assert (float(m2) - 1) ** 2 == pytest.approx(1.0, rel=1e-6)
    assert sv.rayleigh_frequency(mode, pts) == pytest.approx(math.pi, rel=1e-6)
    with pytest.raises(ValueError):
        sv.rayleigh_loss(constant(0.0), pts)


def test_rayleigh_constraint_for_doubled_mode():
    # 2 sin(pi x): mean u^2 = 2, so the penalty is (2 - 1)^2 = 1
    pts = ((np.arange(4000) + 0.5) / 4000)[:, None]
    doubled = field(lambda xs: 2 * ad.sin(math.pi * xs[0]))
    assert float(sv.rayleigh_loss(doubled, pts)) == pytest.approx(math.pi**2 + 1, rel=1e-6)


def test_eikonal_examples():
    pts = np.random.default_rng(0).uniform(-1, 1, (100, 2))
    line = (X - 2 * Y + 0.3) / math.sqrt(5)
    assert float(sv.eikonal_loss(line, pts)) <= 1e-28
    assert float(sv.eikonal_loss(constant(0.0), pts)) == 1.0


def test_square_interface_distance_extremes():
    from adfpinn.bench_cli import _square_sdf

    grid = sv.grid_points([-1, -1], [1, 1], 201)
    d = np.asarray(field(_square_sdf)(jnp.asarray(grid)))
    assert d.max() == pytest.approx(1 / math.sqrt(2))
    assert d.min() == pytest.approx(-0.5)


# ---------------------------------------------------------------- errors

def test_normalized_error_examples():
    grid = np.linspace(0, 1, 201)[:, None]
    exact = lambda p: np.sin(np.pi * p[:, 0])  # noqa: E731
    assert sv.normalized_error(exact, exact, grid) == 0.0
    assert sv.normalized_error(lambda p: 2 * exact(p), exact, grid) == pytest.approx(1.0)
    shifted = lambda p: exact(p) + 0.01  # noqa: E731
    oracle = 0.01 * math.sqrt(201) / np.linalg.norm(exact(grid))
    assert sv.normalized_error(shifted, exact, grid) == pytest.approx(oracle, rel=1e-12)
    zero = lambda p: 0 * p[:, 0]  # noqa: E731
    assert sv.normalized_error(lambda p: 0 * p[:, 0] + 0.5, zero, grid) == pytest.approx(0.5)


# ---------------------------------------------------------------- training

def small_objective(seed=0):
    net = init_mlp([1, 8, 1], "tanh", seed)
    pts = np.linspace(0.05, 0.95, 20)[:, None]
    phi = X * (1 - X)

    def ansatz(params):
        return phi * field(lambda xs: mlp_apply(params, xs, "tanh"))

    exact = lambda p: np.asarray(p)[:, 0] * (1 - np.asarray(p)[:, 0]) / 2  # noqa: E731
    return sv.Objective(
        loss=lambda params: sv.collocation_loss(ansatz(params), sv.neg_laplacian_op, 1.0, pts),
        params=net.params,
        predict=lambda params, p: ansatz(params)(jnp.asarray(p)),
        exact=exact,
        grid=np.linspace(0, 1, 201)[:, None],
    )


def test_train_lr_zero_keeps_parameters():
    obj = small_objective()
    trace, params = sv.train(obj, sv.TrainConfig(epochs=5, lr=0.0))
    assert len(trace) == 5
    assert len(set(trace.loss)) == 1
    for (W0, b0), (W1, b1) in zip(obj.params, params):
        assert np.array_equal(W0, W1) and np.array_equal(b0, b1)


def test_train_is_deterministic_and_descends():
    t1, _ = sv.train(small_objective(), sv.TrainConfig(epochs=300, lr=1e-2, error_every=100))
    t2, _ = sv.train(small_objective(), sv.TrainConfig(epochs=300, lr=1e-2, error_every=100))
    assert t1.loss == t2.loss
    assert np.array_equal(t1.error, t2.error, equal_nan=True)
    assert t1.loss[-1] < 0.01 * t1.loss[0]
    assert t1.final_error < 0.05
    assert np.isnan(t1.error[0]) and np.isfinite(t1.error[99])


def test_train_reports_nonfinite_epoch():
    obj = small_objective()
    bad = sv.Objective(loss=lambda p: obj.loss(p) * jnp.inf, params=obj.params, predict=obj.predict)
    with pytest.raises(ad.NonFiniteError, match="epoch 1"):
        sv.train(bad, sv.TrainConfig(epochs=3))


@pytest.mark.parametrize("kwargs", [{"epochs": 0}, {"loss_weight": 1.5}, {"precision": "f16"}])
def test_train_config_validation(kwargs):
    with pytest.raises(ValueError):
        sv.TrainConfig(**kwargs)
