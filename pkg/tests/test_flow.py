import numpy as np
import pytest

from orliczgeo import metrics as M
from orliczgeo.flow import (FlowConfig, FlowError, FlowState, _Stepper,
                            ding_properness_probe, ricci_step, run_flow,
                            stability_probe)
from orliczgeo.sampling import random_potential
from orliczgeo.toric import SymplecticPotential, make_grid


@pytest.fixture(scope="module")
def g512():
    return make_grid(512)


@pytest.fixture(scope="module")
def zero512(g512):
    return SymplecticPotential(g512, np.zeros(512), validate=False)


def test_config_validation(zero512):
    with pytest.raises(FlowError):
        FlowConfig(initial=zero512, dt=-0.1)
    with pytest.raises(FlowError):
        FlowConfig(initial=zero512, normalization="bogus")
    with pytest.raises(FlowError):
        FlowConfig(initial=zero512.shifted(1.0))  # AM != 0 under am_zero


def test_reference_is_fixed_point(g512, zero512):
    stepper = _Stepper(g512)
    G, _, _, _ = stepper.rhs(np.zeros(512))
    assert np.max(np.abs(G)) < 1e-12
    cfg = FlowConfig(initial=zero512, dt=0.05, t_end=1.0)
    st = ricci_step(FlowState(zero512, 0.0, {}), cfg, stepper=stepper)
    assert np.max(np.abs(st.potential.values)) < 1e-10


def test_short_run_decays(g512, zero512):
    start = M.renormalize(random_potential(g512, 17, 0, amplitude=0.1,
                                           even=True))
    cfg = FlowConfig(initial=start, dt=0.05, t_end=4.0, reference_ke=zero512)
    traj, summary = run_flow(cfg)
    sups = [st.diagnostics["sup_rdot"] for st in traj]
    assert sups[-1] < sups[0]
    assert summary["decay_fit"]["slope"] < -1.0
    assert summary["max_am_drift"] < 1e-10
    assert traj[-1].diagnostics["d1_to_ref"] < traj[0].diagnostics["d1_to_ref"]


def test_mass_one_identity(g512):
    start = M.renormalize(random_potential(g512, 17, 1, amplitude=0.1,
                                           even=True))
    cfg = FlowConfig(initial=start, dt=0.05, t_end=1.0,
                     normalization="mass_one")
    traj, _ = run_flow(cfg)
    assert max(st.diagnostics["mass_defect"] for st in traj) < 1e-10


def test_normalization_equivalence(g512):
    start = M.renormalize(random_potential(g512, 17, 2, amplitude=0.1,
                                           even=True))
    t_a, _ = run_flow(FlowConfig(initial=start, dt=0.05, t_end=1.0))
    t_m, _ = run_flow(FlowConfig(initial=start, dt=0.05, t_end=1.0,
                                 normalization="mass_one"))
    for sa, sm in zip(t_a, t_m):
        diff = sa.potential.values - sm.potential.values
        assert np.max(np.abs(diff - np.mean(diff))) < 1e-8


def test_stability_probe_verdicts(g512, zero512, w1):
    start = M.renormalize(random_potential(g512, 17, 3, amplitude=0.1,
                                           even=True))
    traj, _ = run_flow(FlowConfig(initial=start, dt=0.1, t_end=8.0))
    pots = [st.potential for st in traj[::10]]
    rep = stability_probe(pots, w1)
    assert rep["verdict"] == "cauchy"
    assert rep["language"] == "no divergence observed"
    diverging = [SymplecticPotential(g512, -t * start.values, validate=False)
                 for t in np.linspace(0.0, 3.0, 8)]
    rep = stability_probe(diverging, w1)
    assert rep["verdict"] == "diverging"
    with pytest.raises(FlowError):
        stability_probe(pots[:2], w1)


def test_ding_probe_calibration_roundtrip(g512):
    samples = [M.renormalize(random_potential(g512, 17, 10 + k))
               for k in range(30)]
    rep = ding_properness_probe(samples)
    # calibrated constants admit their own calibration set
    rep2 = ding_properness_probe(samples, constants=rep["constants"])
    assert sum(rep2["violations"].values()) == 0
    assert rep["constants"]["C"] > 0
