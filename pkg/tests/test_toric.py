import numpy as np
import pytest

from orliczgeo.sampling import random_potential
from orliczgeo.toric import (SymplecticPotential, ToricError, legendre,
                             ma_partition_check, ma_pushforward, make_grid,
                             max_potential, rooftop, softplus, weak_geodesic)


def test_grid_minimum_size():
    with pytest.raises(ToricError):
        make_grid(32)


def test_reference_potential_primal_is_softplus(grid1024):
    u = SymplecticPotential(grid1024, np.zeros(1024))
    s = np.linspace(-8.0, 8.0, 101)
    assert np.max(np.abs(u.primal(s) - softplus(s))) < 1e-9


def test_convexity_validation():
    g = make_grid(256)
    bad = 0.1 * np.sin(40 * np.pi * g.y)  # oscillation beats g_ref curvature
    with pytest.raises(ToricError):
        SymplecticPotential(g, bad)


def test_shift_moves_primal_by_constant(grid1024):
    u = random_potential(grid1024, 5, 0)
    s = np.linspace(-4.0, 4.0, 64)
    assert np.max(np.abs(u.shifted(0.7).primal(s) - u.primal(s) - 0.7)) < 1e-9


def test_moment_inverse_solves_first_order_condition(grid1024):
    u = random_potential(grid1024, 5, 1)
    s = np.linspace(-6.0, 6.0, 201)
    y = u.moment_inverse(s)
    from scipy.special import logit
    resid = logit(y) + u._vp(y) - s
    # residual vanishes except on affine facets where y is non-unique
    assert np.median(np.abs(resid)) < 1e-9


def test_csv_roundtrip(tmp_path, grid1024):
    u = random_potential(grid1024, 5, 2)
    path = tmp_path / "u.csv"
    u.to_csv(path)
    back = SymplecticPotential.from_csv(path)
    assert np.array_equal(back.values, u.values)


def test_csv_rejects_wrong_grid(tmp_path):
    path = tmp_path / "u.csv"
    with open(path, "w") as fh:
        fh.write("y,dual_value\n" + "0.1,0.0\n0.5,0.0\n0.9,0.0\n" * 30)
    with pytest.raises(ToricError):
        SymplecticPotential.from_csv(path)


def test_legendre_transform_of_reference(grid1024):
    g = grid1024
    s = np.linspace(-6.0, 6.0, 301)
    phi = legendre(g.y, g.g_ref, s)
    assert np.max(np.abs(phi - softplus(s))) < 1e-4


def test_ma_pushforward_is_lebesgue(grid1024):
    u = random_potential(grid1024, 5, 3)
    mu = ma_pushforward(u)
    assert mu.probability
    assert np.array_equal(mu.nodes, grid1024.y)
    assert np.max(np.abs(mu.compose(np.sin) - np.sin(u.s_nodes))) == 0.0


def test_rooftop_below_both_and_idempotent(grid1024):
    u0 = random_potential(grid1024, 5, 4)
    u1 = random_potential(grid1024, 5, 5)
    p = rooftop(u0, u1)
    s = np.linspace(-6.0, 6.0, 101)
    assert np.all(p.primal(s) <= np.minimum(u0.primal(s), u1.primal(s)) + 1e-9)
    assert np.array_equal(rooftop(u0, u0).values, u0.values)


def test_max_potential_above_both(grid1024):
    u0 = random_potential(grid1024, 5, 6)
    u1 = random_potential(grid1024, 5, 7)
    m = max_potential(u0, u1)
    s = np.linspace(-6.0, 6.0, 101)
    target = np.maximum(u0.primal(s), u1.primal(s))
    assert np.max(np.abs(m.primal(s) - target)) < 1e-2
    assert np.all(m.primal(s) >= target - 1e-9)


def test_weak_geodesic_endpoints_and_linearity(grid1024):
    u0 = random_potential(grid1024, 5, 8)
    u1 = random_potential(grid1024, 5, 9)
    seg = weak_geodesic(u0, u1)
    assert np.array_equal(seg.evaluator(0.0).values, u0.values)
    assert np.array_equal(seg.evaluator(1.0).values, u1.values)
    mid = seg.evaluator(0.5).values
    assert np.allclose(mid, 0.5 * (u0.values + u1.values))
    assert np.array_equal(seg.tangent(0.3), u0.values - u1.values)


def test_mixed_grids_rejected(grid1024):
    u0 = random_potential(grid1024, 5, 10)
    u1 = random_potential(make_grid(256), 5, 10)
    with pytest.raises(ToricError):
        rooftop(u0, u1)


def test_ma_partition_total_mass(grid1024):
    u0 = random_potential(grid1024, 5, 11)
    u1 = random_potential(grid1024, 5, 12)
    rep = ma_partition_check(u0, u1)
    assert abs(rep["total_mass"] - 1.0) < 1e-2
    assert rep["covered_fraction"] > 0.99
    assert rep["mass_defect"] <= 16.0 * rep["max_cell_mass"]
