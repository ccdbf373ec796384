import numpy as np
import pytest

from orliczgeo import d_chi
from orliczgeo.epsgeodesic import (SolverError, chi_length,
                                   laplacian_bound_probe, solve_eps_geodesic,
                                   sup_distance_to_geodesic,
                                   t_convexity_defect)
from orliczgeo.sampling import random_potential
from orliczgeo.toric import SymplecticPotential, weak_geodesic


@pytest.fixture(scope="module")
def flat_field():
    from orliczgeo import make_grid
    g = make_grid(256)
    zero = SymplecticPotential(g, np.zeros(256), validate=False)
    return solve_eps_geodesic(zero, zero, 0.05, nt=32, ns=192, pad=6.0)


def test_flat_analytic_solution(flat_field):
    f = flat_field
    exact = f.epsilon * f.t[:, None] * (f.t[:, None] - 1.0) / 2.0
    assert np.max(np.abs(f.values - exact)) < 1e-10


def test_flat_probe_near_zero(flat_field):
    assert laplacian_bound_probe(flat_field) < 1e-6


def test_rejects_nonpositive_eps(grid1024):
    zero = SymplecticPotential(grid1024, np.zeros(1024), validate=False)
    with pytest.raises(ValueError):
        solve_eps_geodesic(zero, zero, 0.0)


def test_generic_pair_properties(grid1024, w2):
    g = grid1024
    u0 = random_potential(g, 13, 0, amplitude=0.3)
    u1 = random_potential(g, 13, 1, amplitude=0.3)
    f = solve_eps_geodesic(u0, u1, 1e-2, nt=48, ns=256)
    # boundary rows agree with the endpoint potentials
    assert np.max(np.abs(f.values[0] - (u0.primal(f.s)
                                        - np.logaddexp(0, f.s)))) < 1e-12
    # t-convexity of the solution
    assert t_convexity_defect(f) > -1e-8
    # path length approximates the metric
    d = d_chi(u0, u1, w2)
    assert abs(chi_length(f, w2) - d) / d < 0.05
    # residual history is decreasing overall
    assert f.residual_history[-1] < f.residual_history[0]


def test_sup_distance_shrinks_with_eps(grid1024):
    g = grid1024
    u0 = random_potential(g, 13, 2, amplitude=0.3)
    u1 = random_potential(g, 13, 3, amplitude=0.3)
    fa = solve_eps_geodesic(u0, u1, 1e-1, nt=32, ns=192)
    fb = solve_eps_geodesic(u0, u1, 1e-2, nt=32, ns=192)
    assert sup_distance_to_geodesic(fb) < sup_distance_to_geodesic(fa)


def test_chi_length_of_segment_constant_shift(grid1024, w2):
    u0 = random_potential(grid1024, 13, 4)
    seg = weak_geodesic(u0, u0.shifted(0.6))
    assert abs(chi_length(seg, w2) - 0.6) < 1e-6
