import numpy as np
import pytest

from orliczgeo import metrics as M
from orliczgeo.sampling import random_potential
from orliczgeo.toric import SymplecticPotential, rooftop, weak_geodesic


def test_am_energy_dual_fiber_agreement(grid1024):
    u = random_potential(grid1024, 9, 0)
    # cross_check raises on disagreement beyond 1e-6
    am = M.am_energy(u)
    assert abs(am + float(np.mean(u.values))) < 1e-6


def test_am_shift_covariance(grid1024):
    u = random_potential(grid1024, 9, 1)
    assert abs(M.am_energy(u.shifted(0.3)) - M.am_energy(u) - 0.3) < 1e-9


def test_renormalize(grid1024):
    u = random_potential(grid1024, 9, 2)
    assert abs(M.am_energy(M.renormalize(u))) < 1e-12


def test_d_chi_metric_axioms(grid1024, w2):
    u0 = random_potential(grid1024, 9, 3)
    u1 = random_potential(grid1024, 9, 4)
    u2 = random_potential(grid1024, 9, 5)
    assert M.d_chi(u0, u0, w2) == 0.0
    assert M.d_chi(u0, u1, w2) == M.d_chi(u1, u0, w2)
    assert (M.d_chi(u0, u1, w2)
            <= M.d_chi(u0, u2, w2) + M.d_chi(u2, u1, w2) + 1e-12)


def test_d_chi_translation_invariance(grid1024, w2):
    u0 = random_potential(grid1024, 9, 6)
    u1 = random_potential(grid1024, 9, 7)
    d = M.d_chi(u0, u1, w2)
    assert abs(M.d_chi(u0.shifted(0.4), u1.shifted(0.4), w2) - d) < 1e-12
    assert abs(M.d_chi(u0, u0.shifted(0.4), w2) - 0.4) < 1e-12


def test_d1_equals_am_difference_for_ordered_pair(grid1024, w1):
    u0 = random_potential(grid1024, 9, 8)
    u1 = random_potential(grid1024, 9, 9)
    p = rooftop(u0, u1)  # p <= u0 pointwise
    assert abs(M.d_p(p, u0, 1.0)
               - (M.am_energy(u0) - M.am_energy(p))) < 1e-10


def test_i_energy_nonnegative_and_kills_constants(grid1024):
    u0 = random_potential(grid1024, 9, 10)
    u1 = random_potential(grid1024, 9, 11)
    assert M.i_energy(u0, u1) >= -1e-10
    assert abs(M.i_energy(u0, u0.shifted(1.3))) < 1e-8


def test_e_chi_zero_for_nonnegative_potential(grid1024, w2):
    u = random_potential(grid1024, 9, 12)
    shifted = u.shifted(M.sup_potential(u) + 1.0)  # primal >= 1 > 0
    assert M.e_chi_energy(shifted, w2) == 0.0
    assert M.e_chi_energy(u.shifted(-10.0), w2) < 0.0


def test_ding_requires_normalized(grid1024):
    u = random_potential(grid1024, 9, 13).shifted(2.0)
    with pytest.raises(M.MetricsError):
        M.ding_and_j(u)
    f, j = M.ding_and_j(M.renormalize(u))
    assert np.isfinite(f) and np.isfinite(j)
    # Jensen: F <= J for the reference measure
    assert f <= j + 1e-12


def test_ricci_potential_constant(grid1024):
    h, rep = M.ricci_potential(grid1024)
    assert rep["cohomology_defect"] < 1e-8
    assert rep["constancy_defect"] < 1e-8
    assert abs(float(np.mean(np.exp(h))) - 1.0) < 1e-12


def test_pythagoras_dual_defect_zero(grid1024):
    u0 = random_potential(grid1024, 9, 14)
    u1 = random_potential(grid1024, 9, 15)
    for p in (1.0, 2.0):
        rep = M.d_p_pythagoras_check(u0, u1, p)
        assert rep["defect_dual"] < 1e-12
        assert rep["defect_oracle"] < 1e-3


def test_geodesic_constant_speed(grid1024, w2):
    u0 = random_potential(grid1024, 9, 16)
    u1 = random_potential(grid1024, 9, 17)
    rep = M.constant_speed_report(weak_geodesic(u0, u1), w2)
    assert rep["variation"] < 1e-8
    assert abs(rep["mean_speed"] - M.d_chi(u0, u1, w2)) < 1e-7


def test_speed_of_constant_shift_path(grid1024, w2):
    u0 = random_potential(grid1024, 9, 18)
    seg = weak_geodesic(u0, u0.shifted(0.8))
    sp = M.geodesic_speed(seg, w2, 0.5)
    assert abs(sp - 0.8) < 1e-7


def test_sup_potential(grid1024):
    u = SymplecticPotential(grid1024, np.zeros(1024), validate=False)
    assert M.sup_potential(u) == 0.0
    assert M.sup_potential(u.shifted(2.0)) == 2.0
