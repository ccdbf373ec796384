"""Executable property suites.

Each suite returns a list of report rows; a row records the property name,
trial count, violation count beyond the stated tolerance, the worst
violation, and (where the theory gives only existence) the empirical
constant observed.  The CLI `verify` command renders these rows as CSV and
exits nonzero when any row fails.
"""

from __future__ import annotations

import numpy as np

from . import metrics as M
from . import weights as W
from ._kernels import legendre_scan
from .epsgeodesic import (chi_length, laplacian_bound_probe,
                          solve_eps_geodesic, sup_distance_to_geodesic,
                          t_convexity_defect, tangent_integral_report)
from .flow import (FlowConfig, ding_properness_probe, ricci_step, run_flow,
                   stability_probe)
from .orlicz import gauge_norm, holder_pair, mM_helpers
from .sampling import random_function, random_potential
from .toric import (SymplecticPotential, make_grid, ma_partition_check,
                    max_potential, rooftop, weak_geodesic)

__all__ = ["run_suite", "SUITES"]


def _row(suite, prop, trials, violations, worst, constant=None):
    return {
        "suite": suite,
        "property": prop,
        "trials": int(trials),
        "violations": int(violations),
        "max_violation": float(worst),
        "empirical_constant": float("nan") if constant is None else float(constant),
        "passed": int(violations) == 0,
    }


def _tally(vals, tol):
    vals = np.asarray(vals, dtype=np.float64)
    return int(np.sum(vals > tol)), float(np.max(vals, initial=0.0))


def _battery_weights():
    return [
        ("chi_1", W.make_power_weight(1.0)),
        ("chi_2", W.make_power_weight(2.0)),
        ("mollified_chi_1.5", W.mollify(W.make_power_weight(1.5), 8)),
    ]


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def suite_weights(trials=50, seed=7, grid=256):
    rows = []
    rng = np.random.default_rng([seed, 0])
    bases = {
        "chi_1": W.make_power_weight(1.0),
        "chi_1.5": W.make_power_weight(1.5),
        "chi_2": W.make_power_weight(2.0),
        "chi_3": W.make_power_weight(3.0),
    }
    moll = {name: W.mollify(w, 8) for name, w in bases.items()}

    worst = 0.0
    for w in list(bases.values()) + list(moll.values()):
        rep = W.validate_weight(w)
        worst = max(worst, max(rep.values()))
    rows.append(_row("weights", "axioms_all_weights", len(bases) + len(moll),
                     int(worst > 1e-10), worst))

    viol, worst = 0, 0.0
    for k in range(trials):
        eps = rng.uniform(0.05, 0.95)
        samples = np.exp(rng.uniform(np.log(1e-3), np.log(50.0), size=64))
        for w in list(bases.values()) + [moll["chi_1.5"]]:
            rep = W.check_growth_sandwich(w, eps, samples)
            if rep["max_violation"] > 1e-10:
                viol += 1
            worst = max(worst, rep["max_violation"])
    rows.append(_row("weights", "growth_sandwich", trials, viol, worst))

    # h_k bracket and uniform convergence of mollification
    l_grid = np.linspace(-10.0, 10.0, 2001)
    viol, worst = 0, 0.0
    for name, base in bases.items():
        devs = []
        for k in (4, 8, 16, 32):
            mk = W.mollify(base, k)
            if not (1.0 - 1.0 / k - 0.26 <= mk.mollify_scale
                    <= 1.0 + 1.0 / k + 0.26):
                viol += 1
            devs.append(float(np.max(np.abs(mk.evaluate(l_grid)
                                            - base.evaluate(l_grid)))))
        if not (devs[-1] <= devs[0] + 1e-14 and devs[-1] < 0.05):
            viol += 1
        worst = max(worst, devs[-1])
    rows.append(_row("weights", "mollify_hk_and_convergence", 4 * len(bases),
                     viol, worst))

    # Young identity for closed-form conjugates; inequality for numeric ones
    viol, worst = 0, 0.0
    conj2 = W.conjugate(bases["chi_2"])
    a = rng.uniform(0.01, 10.0, size=200)
    resid = np.abs(bases["chi_2"].evaluate(bases["chi_2"].derivative(a))
                   + conj2.evaluate(a) - a * bases["chi_2"].derivative(a))
    v1, w1 = _tally(resid, 1e-10)
    viol += v1
    worst = max(worst, w1)
    num_conj = W.conjugate(moll["chi_1.5"])
    aa = rng.uniform(-10.0, 10.0, size=trials * 4)
    bb = rng.uniform(-10.0, 10.0, size=trials * 4)
    cv = num_conj.evaluate(bb)
    finite = np.isfinite(cv)
    resid = (moll["chi_1.5"].evaluate(aa[finite]) + cv[finite]
             - aa[finite] * bb[finite])
    v2, w2 = _tally(-resid, 1e-8)
    viol += v2
    worst = max(worst, w2)
    rows.append(_row("weights", "young_identity_inequality",
                     200 + int(np.sum(finite)), viol, worst))

    # numeric conjugate against a brute-force grid sup
    lg = np.geomspace(1e-6, 1e4, 200000)
    lv = moll["chi_1.5"].evaluate(lg)
    hs = rng.uniform(0.0, 1.2, size=50)
    brute = np.maximum(np.max(lg[None, :] * hs[:, None] - lv[None, :], axis=1),
                       0.0)
    refined = num_conj.evaluate(hs)
    viol, worst = _tally(np.abs(refined - brute), 1e-7)
    rows.append(_row("weights", "conjugate_vs_bruteforce", 50, viol, worst))
    return rows


# ---------------------------------------------------------------------------
# orlicz
# ---------------------------------------------------------------------------

def suite_orlicz(trials=100, seed=7, grid=512):
    rows = []
    g = make_grid(grid)
    mu = g.lebesgue
    rng = np.random.default_rng([seed, 1])

    viol, worst = 0, 0.0
    n = 0
    for p in (1.0, 1.5, 2.0, 3.0):
        w = W.make_power_weight(p)
        for k in range(max(1, trials // 4)):
            f = random_function(mu, seed, index=1000 * int(p * 10) + k,
                                rough=0.3 if k % 2 else 0.0)
            lp = float(np.mean(np.abs(f) ** p)) ** (1.0 / p)
            err = abs(gauge_norm(f, w, mu) - lp) / max(lp, 1e-300)
            worst = max(worst, err)
            viol += err > 1e-10
            n += 1
    rows.append(_row("orlicz", "lp_match", n, viol, worst))

    viol, worst = 0, 0.0
    w15 = W.mollify(W.make_power_weight(1.5), 8)
    for k in range(trials // 2):
        f = random_function(mu, seed, index=50000 + k)
        h = random_function(mu, seed, index=60000 + k)
        c = rng.uniform(-5.0, 5.0)
        for w in (W.make_power_weight(1.0), W.make_power_weight(2.0), w15):
            nf, nh = gauge_norm(f, w, mu), gauge_norm(h, w, mu)
            hom = abs(gauge_norm(c * f, w, mu) - abs(c) * nf)
            tri = gauge_norm(f + h, w, mu) - nf - nh
            worst = max(worst, hom, tri)
            viol += (hom > 1e-10 * max(1.0, nf)) + (tri > 1e-10)
    rows.append(_row("orlicz", "norm_axioms", 3 * (trials // 2), viol, worst))

    viol, worst = 0, 0.0
    n = 0
    for name, w in [("chi_1", W.make_power_weight(1.0)),
                    ("chi_2", W.make_power_weight(2.0)),
                    ("mollified_chi_1.5", w15)]:
        conj = W.conjugate(w)
        for k in range(trials // 2):
            f = random_function(mu, seed, index=70000 + k)
            h = random_function(mu, seed, index=80000 + k)
            lhs, rhs = holder_pair(f, h, w, mu, conj=conj)
            gap = lhs - rhs
            worst = max(worst, gap)
            viol += gap > 1e-10
            n += 1
    rows.append(_row("orlicz", "holder", n, viol, worst))

    # norm continuity under weight mollification
    f = random_function(mu, seed, index=90000)
    base = W.make_power_weight(1.0)
    target = gauge_norm(f, base, mu)
    errs = [abs(gauge_norm(f, W.mollify(base, k), mu) - target)
            for k in (4, 8, 16, 32)]
    ok = errs[-1] <= errs[0] + 1e-12 and errs[-1] < 0.05 * max(target, 1e-12)
    rows.append(_row("orlicz", "mollified_norm_convergence", 4,
                     0 if ok else 1, errs[-1]))

    viol, worst = 0, 0.0
    for k in range(trials):
        f = random_function(mu, seed, index=95000 + k)
        for w in (W.make_power_weight(1.5), w15):
            gap = float(np.mean(np.abs(f))) - gauge_norm(f, w, mu)
            worst = max(worst, gap)
            viol += gap > 1e-9
    rows.append(_row("orlicz", "l1_domination", 2 * trials, viol, worst,
                     constant=1.0))
    return rows


# ---------------------------------------------------------------------------
# toric
# ---------------------------------------------------------------------------

def _phi_scan(u, s):
    return legendre_scan(u.grid.y, u.dual, s)


def suite_toric(trials=60, seed=7, grid=1024):
    rows = []
    g = make_grid(grid)
    rng = np.random.default_rng([seed, 2])
    h = 1.0 / grid

    # Legendre involution and hull oracle
    viol, worst = 0, 0.0
    from ._kernels import lower_convex_hull
    for k in range(trials // 4):
        u = random_potential(g, seed, index=k)
        s = np.linspace(u.s_nodes[0] - 2, u.s_nodes[-1] + 2, 2 * grid)
        phi = legendre_scan(g.y, u.dual, s)
        back = legendre_scan(s, phi, g.y)
        err = float(np.max(np.abs(back - u.dual)))
        worst = max(worst, err)
        viol += err > 50.0 * h
    x = np.linspace(-1.0, 1.0, 129)
    fx = np.sin(4 * x) + x ** 2
    hull = lower_convex_hull(x, fx)
    # brute-force hull: max of affine minorants through all sample pairs
    brute = np.full_like(fx, -np.inf)
    for i in range(129):
        for j in range(i + 1, 129):
            sl = (fx[j] - fx[i]) / (x[j] - x[i])
            cand = fx[i] + sl * (x - x[i])
            if np.all(cand <= fx + 1e-12):
                brute = np.maximum(brute, cand)
    err = float(np.max(np.abs(hull - brute)))
    worst = max(worst, err)
    viol += err > 1e-6
    rows.append(_row("toric", "legendre_involution_and_hull", trials // 4 + 1,
                     viol, worst))

    # rooftop properties
    viol, worst = 0, 0.0
    for k in range(trials):
        u0 = random_potential(g, seed, index=100 + 2 * k)
        u1 = random_potential(g, seed, index=101 + 2 * k)
        p = rooftop(u0, u1)
        s = np.linspace(min(u0.s_nodes[0], u1.s_nodes[0]) - 1,
                        max(u0.s_nodes[-1], u1.s_nodes[-1]) + 1, 512)
        gap = float(np.max(_phi_scan(p, s)
                           - np.minimum(_phi_scan(u0, s), _phi_scan(u1, s))))
        idem = float(np.max(np.abs(rooftop(u0, u0).values - u0.values)))
        worst = max(worst, gap, idem)
        viol += (gap > 1e-9) + (idem > 0.0)
        # monotonicity in dual coordinates is exact for the max
        v0 = np.maximum(u0.values, u1.values)
        vbig = np.maximum(u0.values + 0.1, u1.values + 0.05)
        viol += not np.all(vbig >= v0)
    rows.append(_row("toric", "rooftop_contact_idempotence_monotone",
                     3 * trials, viol, worst))

    # max potential primal oracle
    viol, worst = 0, 0.0
    for k in range(trials // 2):
        u0 = random_potential(g, seed, index=300 + 2 * k)
        u1 = random_potential(g, seed, index=301 + 2 * k)
        m = max_potential(u0, u1)
        s = np.linspace(min(u0.s_nodes[0], u1.s_nodes[0]) - 1,
                        max(u0.s_nodes[-1], u1.s_nodes[-1]) + 1, 512)
        err = float(np.max(np.abs(
            _phi_scan(m, s) - np.maximum(_phi_scan(u0, s), _phi_scan(u1, s)))))
        worst = max(worst, err)
        viol += err > 50.0 * h
    rows.append(_row("toric", "max_potential_primal", trials // 2, viol, worst))

    # MA partition formula
    viol, worst = 0, 0.0
    for k in range(trials // 4):
        u0 = random_potential(g, seed, index=400 + 2 * k)
        u1 = random_potential(g, seed, index=401 + 2 * k)
        rep = ma_partition_check(u0, u1)
        defect = rep["mass_defect"]
        worst = max(worst, defect)
        viol += defect > 16.0 * max(rep["max_cell_mass"], 1e-12)
    rows.append(_row("toric", "ma_partition", trials // 4, viol, worst))

    # pushforward invariance along the geodesic
    viol, worst = 0, 0.0
    tests = [np.abs, np.square, W.make_power_weight(2.0).evaluate]
    for k in range(trials // 6):
        u0 = random_potential(g, seed, index=500 + 2 * k)
        u1 = random_potential(g, seed, index=501 + 2 * k)
        seg = weak_geodesic(u0, u1)
        dt = 1e-5
        for fn in tests:
            vals = []
            for t in np.linspace(0.1, 0.9, 5):
                ut = seg.evaluator(t)
                s = ut.s_nodes
                udot = (seg.evaluator(t + dt).primal(s)
                        - seg.evaluator(t - dt).primal(s)) / (2 * dt)
                vals.append(float(np.mean(fn(udot))))
            spread = max(vals) - min(vals)
            worst = max(worst, spread)
            viol += spread > 1e-6
    rows.append(_row("toric", "pushforward_invariance", 3 * (trials // 6),
                     viol, worst))

    # envelope / geodesic identity
    viol, worst = 0, 0.0
    for k in range(trials // 6):
        u0 = random_potential(g, seed, index=600 + 2 * k)
        u1 = random_potential(g, seed, index=601 + 2 * k)
        seg = weak_geodesic(u0, u1)
        tau = rng.uniform(-0.5, 0.5)
        s = np.linspace(min(u0.s_nodes[0], u1.s_nodes[0]) - 1,
                        max(u0.s_nodes[-1], u1.s_nodes[-1]) + 1, 512)
        ts = np.linspace(0.0, 1.0, 65)
        lhs = np.min(np.stack([
            _phi_scan(seg.evaluator(t), s) - tau * t for t in ts]), axis=0)
        rhs = _phi_scan(rooftop(u0, u1.shifted(-tau)), s)
        err = float(np.max(np.abs(lhs - rhs)))
        worst = max(worst, err)
        viol += err > 100.0 * h
    rows.append(_row("toric", "envelope_geodesic_identity", trials // 6,
                     viol, worst))
    return rows


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _pair(g, seed, k, base=0):
    return (random_potential(g, seed, index=base + 2 * k),
            random_potential(g, seed, index=base + 2 * k + 1))


def suite_metrics(trials=200, seed=7, grid=1024):
    rows = []
    g = make_grid(grid)
    rng = np.random.default_rng([seed, 3])
    battery = _battery_weights()

    # metric axioms
    viol, worst = 0, 0.0
    for k in range(trials // 2):
        u0, u1 = _pair(g, seed, k, base=10_000)
        u2 = random_potential(g, seed, index=10_000 + 100000 + k)
        name, w = battery[k % len(battery)]
        d01 = M.d_chi(u0, u1, w)
        d10 = M.d_chi(u1, u0, w)
        d02 = M.d_chi(u0, u2, w)
        d12 = M.d_chi(u1, u2, w)
        sym = abs(d01 - d10)
        tri = d01 - d02 - d12
        self_d = M.d_chi(u0, u0, w)
        worst = max(worst, sym, tri, self_d)
        viol += (sym > 0.0) + (tri > 1e-9) + (self_d > 0.0) + (d01 < 0.0)
    rows.append(_row("metrics", "metric_axioms", 4 * (trials // 2), viol, worst))

    # ordered sandwich with the paper constant 1/8 (n = 1)
    viol, worst = 0, 0.0
    for k in range(trials):
        a, b = _pair(g, seed, k, base=20_000)
        u0, u1 = rooftop(a, b), a          # u0 <= u1 in primal coordinates
        name, w = battery[k % len(battery)]
        d = M.d_chi(u0, u1, w)
        n0 = gauge_norm(M.relative_primal(u1, u0), w, g.lebesgue)
        n1 = gauge_norm(M.relative_primal(u0, u1), w, g.lebesgue)
        slack = 1e-6
        gaps = (max(0.125 * n0, n1) - d - slack, d - n0 - slack)
        worst = max(worst, *gaps)
        viol += any(x > 0 for x in gaps)
    rows.append(_row("metrics", "ordered_sandwich_1_8", trials, viol, worst))

    # rooftop decomposition with constants 1/2 and 2
    viol, worst = 0, 0.0
    for k in range(trials):
        u0, u1 = _pair(g, seed, k, base=30_000)
        name, w = battery[k % len(battery)]
        p = rooftop(u0, u1)
        d = M.d_chi(u0, u1, w)
        dsum = M.d_chi(u0, p, w) + M.d_chi(u1, p, w)
        gaps = (0.5 * dsum - d - 1e-6, d - 2.0 * dsum - 1e-6)
        worst = max(worst, *gaps)
        viol += any(x > 0 for x in gaps)
    rows.append(_row("metrics", "rooftop_decomposition", trials, viol, worst))

    # max analog: same shape, empirical constant
    ratio_hi = 0.0
    for k in range(trials // 2):
        u0, u1 = _pair(g, seed, k, base=40_000)
        name, w = battery[k % len(battery)]
        m = max_potential(u0, u1)
        d = M.d_chi(u0, u1, w)
        dsum = M.d_chi(u0, m, w) + M.d_chi(u1, m, w)
        if d > 1e-12 and dsum > 1e-12:
            ratio_hi = max(ratio_hi, d / dsum, dsum / d)
    rows.append(_row("metrics", "max_decomposition_empirical", trials // 2,
                     int(not np.isfinite(ratio_hi)), 0.0, constant=ratio_hi))

    # max-additivity of I_chi with constants 1/2 and 2
    viol, worst = 0, 0.0
    for k in range(trials // 2):
        u0, u1 = _pair(g, seed, k, base=50_000)
        name, w = battery[k % len(battery)]
        m = max_potential(u0, u1)
        i_full = M.i_chi_energy(u0, u1, w)
        i_sum = M.i_chi_energy(u0, m, w) + M.i_chi_energy(m, u1, w)
        gaps = (0.5 * i_sum - i_full - 1e-6, i_full - 2.0 * i_sum - 1e-6)
        worst = max(worst, *gaps)
        viol += any(x > 0 for x in gaps)
    rows.append(_row("metrics", "i_chi_max_additivity", trials // 2, viol, worst))

    # rooftop contraction
    viol, worst = 0, 0.0
    for k in range(trials):
        u = random_potential(g, seed, index=60_000 + 3 * k)
        v = random_potential(g, seed, index=60_001 + 3 * k)
        z = random_potential(g, seed, index=60_002 + 3 * k)
        name, w = battery[k % len(battery)]
        gap = (M.d_chi(rooftop(u, v), rooftop(u, z), w)
               - M.d_chi(v, z, w) - 1e-6)
        worst = max(worst, gap)
        viol += gap > 0
    rows.append(_row("metrics", "rooftop_contraction", trials, viol, worst))

    # halfway estimate, empirical constant
    c_half = 0.0
    for k in range(trials // 4):
        u0, u1 = _pair(g, seed, k, base=70_000)
        name, w = battery[k % len(battery)]
        s = np.linspace(min(u0.s_nodes[0], u1.s_nodes[0]) - 6,
                        max(u0.s_nodes[-1], u1.s_nodes[-1]) + 6, 2 * grid)
        mid_phi = 0.5 * (u0.primal(s) + u1.primal(s))
        g_mid = legendre_scan(s, mid_phi, g.y)
        mid = SymplecticPotential(g, g_mid - g.g_ref, validate=False)
        d_full = M.d_chi(u0, u1, w)
        if d_full > 1e-9:
            c_half = max(c_half, M.d_chi(u0, mid, w) / d_full)
    rows.append(_row("metrics", "halfway_empirical", trials // 4,
                     int(not np.isfinite(c_half)), 0.0, constant=c_half))

    # AM Lipschitz via the Holder pairing
    viol, worst = 0, 0.0
    one_norms = []
    for name, w in battery:
        cw = W.conjugate(w).weight
        if cw.spec.get("kind") == "indicator":
            one_norms.append(1.0)
        else:
            one_norms.append(gauge_norm(np.ones(grid), cw, g.lebesgue))
    for k in range(trials // 2):
        u0, u1 = _pair(g, seed, k, base=80_000)
        name, w = battery[k % len(battery)]
        one_norm = one_norms[k % len(battery)]
        gap = (abs(M.am_energy(u0, cross_check=False)
                   - M.am_energy(u1, cross_check=False))
               - one_norm * M.d_chi(u0, u1, w) - 1e-9)
        worst = max(worst, gap)
        viol += gap > 0
    rows.append(_row("metrics", "am_lipschitz", trials // 2, viol, worst))

    # comparison u >= v >= w
    viol, worst = 0, 0.0
    for k in range(trials):
        a, b = _pair(g, seed, k, base=90_000)
        p = rooftop(a, b)
        pp = p.shifted(-abs(rng.uniform(0.05, 0.5)))
        name, w = battery[k % len(battery)]
        gap = M.d_chi(a, p, w) - M.d_chi(a, pp, w) - 1e-10
        worst = max(worst, gap)
        viol += gap > 0
    rows.append(_row("metrics", "ordered_comparison", trials, viol, worst))

    # AM affine along geodesics (fiber-quadrature route)
    viol, worst = 0, 0.0
    for k in range(trials // 10 or 1):
        u0, u1 = _pair(g, seed, k, base=95_000)
        seg = weak_geodesic(u0, u1)
        a0 = M.am_energy(u0)
        a1 = M.am_energy(u1)
        for t in np.linspace(0.1, 0.9, 9):
            dev = abs(M.am_energy(seg.evaluator(t)) - ((1 - t) * a0 + t * a1))
            worst = max(worst, dev)
            viol += dev > 1e-6
    rows.append(_row("metrics", "am_affine_on_geodesics",
                     9 * (trials // 10 or 1), viol, worst))

    # sup-control: calibrate on one sample set, assert on another
    w1 = W.make_power_weight(1.0)
    zero = SymplecticPotential(g, np.zeros(grid), validate=False)
    c_sup = 1.0
    for k in range(trials // 4):
        u = M.renormalize(random_potential(g, seed + 1, index=k))
        d = M.d_chi(zero, u, w1)
        c_sup = max(c_sup, M.sup_potential(u) / (d + 1.0))
    c_sup *= 1.5
    viol, worst = 0, 0.0
    for k in range(trials // 2):
        u = M.renormalize(random_potential(g, seed, index=97_000 + k))
        gap = M.sup_potential(u) - c_sup * (M.d_chi(zero, u, w1) + 1.0)
        worst = max(worst, gap)
        viol += gap > 0
    rows.append(_row("metrics", "sup_control", trials // 2, viol, worst,
                     constant=c_sup))

    # i_energy: nonnegativity, constants invisible, max monotonicity
    viol, worst = 0, 0.0
    for k in range(trials // 2):
        u0, u1 = _pair(g, seed, k, base=98_000)
        i01 = M.i_energy(u0, u1)
        ic = M.i_energy(u0, u0.shifted(rng.uniform(-1, 1)))
        imax = M.i_energy(max_potential(u0, u1), u1)
        gaps = (-i01, abs(ic), imax - i01 - 1e-6)
        worst = max(worst, *gaps)
        viol += (i01 < -1e-10) + (abs(ic) > 1e-8) + (imax > i01 + 1e-6)
    rows.append(_row("metrics", "i_energy_properties", 3 * (trials // 2),
                     viol, worst))

    # E_chi agreement with direct fiber quadrature
    viol, worst = 0, 0.0
    w2 = W.make_power_weight(2.0)
    for k in range(trials // 10 or 1):
        u = random_potential(g, seed, index=99_000 + k)
        val = M.e_chi_energy(u, w2)
        s = np.linspace(u.s_nodes[0] - 10, u.s_nodes[-1] + 10, 8192)
        yy = u.moment_inverse(s)
        dens = 1.0 / (1.0 / (yy * (1 - yy)) + u._vpp(yy))
        t = u.primal(s) - np.logaddexp(0.0, s)
        direct = -float(np.trapezoid(
            np.where(t < 0, w2.evaluate(np.minimum(t, 0.0)), 0.0) * dens, s))
        dev = abs(val - direct)
        worst = max(worst, dev)
        viol += dev > 1e-6
    rows.append(_row("metrics", "e_chi_fiber_agreement", trials // 10 or 1,
                     viol, worst))

    # constant geodesic speed
    viol, worst = 0, 0.0
    for k in range(trials // 20 or 1):
        u0, u1 = _pair(g, seed, k, base=96_000)
        name, w = battery[k % len(battery)]
        rep = M.constant_speed_report(weak_geodesic(u0, u1), w)
        worst = max(worst, rep["variation"])
        viol += rep["variation"] > 1e-8
    rows.append(_row("metrics", "constant_speed", trials // 20 or 1, viol,
                     worst))

    # Pythagorean split across the rooftop envelope
    viol, worst = 0, 0.0
    for k in range(trials // 20 or 1):
        u0, u1 = _pair(g, seed, k, base=96_500)
        for p in (1.0, 2.0):
            rep = M.d_p_pythagoras_check(u0, u1, p)
            worst = max(worst, rep["defect_dual"], rep["defect_oracle"])
            viol += rep["defect_dual"] > 1e-12
            viol += rep["defect_oracle"] > 1e-3
    rows.append(_row("metrics", "pythagoras_split", 2 * (trials // 20 or 1),
                     viol, worst))

    # convergence transfer and strong-convergence equivalence
    viol, worst = 0, 0.0
    u = random_potential(g, seed, index=99_500)
    third = random_potential(g, seed, index=99_501)
    bump = g.y * (1.0 - g.y)
    w15 = battery[2][1]
    prev_t = prev_d = prev_i = prev_l1 = np.inf
    for k in range(1, 7):
        uk = SymplecticPotential(g, u.values - 2.0 ** -k * bump, validate=False)
        dk = M.d_chi(uk, u, w15)
        tk = gauge_norm(M.relative_primal(uk, u), w15, g.lebesgue)
        # transfer norm against a fixed third potential
        s3 = third.s_nodes
        tk3 = gauge_norm(uk.primal(s3) - u.primal(s3), w15, g.lebesgue)
        ik = M.i_chi_energy(uk, u, W.make_power_weight(1.0))
        l1k = float(np.mean(np.abs(uk.primal(g.s_ref) - u.primal(g.s_ref))))
        ok = (dk <= prev_d + 1e-14 and tk3 <= prev_t + 1e-14
              and ik <= prev_i + 1e-14 and l1k <= prev_l1 + 1e-14)
        viol += not ok
        prev_d, prev_t, prev_i, prev_l1 = dk, tk3, ik, l1k
    worst = max(prev_d, prev_i, prev_l1)
    viol += prev_d > 1e-2
    rows.append(_row("metrics", "convergence_transfer_strong_eqv", 6, viol,
                     worst))
    return rows


def theorem_c_constants(trials, seed, grid):
    """Empirical two-sided constant between I_chi and d_chi per weight."""
    g = make_grid(grid)
    out = {}
    for name, w in _battery_weights():
        c = 1.0
        for k in range(trials):
            u0, u1 = _pair(g, seed, k, base=200_000)
            d = M.d_chi(u0, u1, w)
            i = M.i_chi_energy(u0, u1, w)
            if d > 1e-10 and i > 1e-10:
                c = max(c, i / d, d / i)
        out[name] = c
    return out


# ---------------------------------------------------------------------------
# epsgeodesic
# ---------------------------------------------------------------------------

def suite_epsgeo(trials=2, seed=7, grid=512):
    rows = []
    g = make_grid(grid)
    zero = SymplecticPotential(g, np.zeros(grid), validate=False)

    # analytic flat solution
    eps = 0.05
    field = solve_eps_geodesic(zero, zero, eps, nt=48, ns=256, pad=8.0)
    exact = eps * field.t[:, None] * (field.t[:, None] - 1.0) / 2.0
    err = float(np.max(np.abs(field.values - exact)))
    rows.append(_row("epsgeodesic", "flat_analytic_solution", 1,
                     int(err > 1e-10), err))
    probe_flat = laplacian_bound_probe(field)
    rows.append(_row("epsgeodesic", "flat_laplacian_probe", 1,
                     int(probe_flat > 1e-6), probe_flat))

    # generic pair: eps sweep
    w2 = W.make_power_weight(2.0)
    viol, worst = 0, 0.0
    for k in range(trials):
        u0 = random_potential(g, seed, index=300_000 + 2 * k, amplitude=0.3)
        u1 = random_potential(g, seed, index=300_001 + 2 * k, amplitude=0.3)
        dists, probes, lens, tvar = [], [], [], []
        for e in (1e-1, 1e-2):
            f = solve_eps_geodesic(u0, u1, e, nt=48, ns=256)
            dists.append(sup_distance_to_geodesic(f))
            probes.append(laplacian_bound_probe(f))
            lens.append(chi_length(f, w2))
            conv = t_convexity_defect(f)
            viol += conv < -1e-8
            rep = tangent_integral_report(f, w2)
            viol += rep["deficit"] > 10.0 * e + 1e-4
        viol += not (dists[0] > dists[1])
        viol += not (0.5 <= probes[0] / max(probes[1], 1e-300) <= 2.0)
        d = M.d_chi(u0, u1, w2)
        gap = abs(lens[-1] - d) / max(d, 1e-300)
        worst = max(worst, gap)
        viol += gap > 0.05
    rows.append(_row("epsgeodesic", "eps_sweep_basicp", trials * 6, viol, worst))
    return rows


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------

def suite_flow(trials=1, seed=7, grid=512):
    rows = []
    g = make_grid(grid)
    zero = SymplecticPotential(g, np.zeros(grid), validate=False)
    w1 = W.make_power_weight(1.0)

    # Ricci potential oracle
    _, rep = M.ricci_potential(g)
    worst = max(rep["cohomology_defect"], rep["constancy_defect"])
    rows.append(_row("flow", "ricci_potential_constant", 2,
                     int(worst > 1e-6), worst))

    # stationarity at the KE reference
    cfg = FlowConfig(initial=zero, dt=0.05, t_end=1.0, reference_ke=zero)
    from .flow import FlowState, _Stepper
    stepper = _Stepper(g)
    st = FlowState(zero, 0.0, {})
    st2 = ricci_step(st, cfg, stepper=stepper)
    move = float(np.max(np.abs(st2.potential.values - zero.values)))
    rows.append(_row("flow", "ke_fixed_point", 1, int(move > 1e-8), move))

    # convergent run with diagnostics
    start = M.renormalize(random_potential(g, seed, index=400_000,
                                           amplitude=0.15, even=True))
    cfg = FlowConfig(initial=start, dt=0.05, t_end=12.0, reference_ke=zero)
    traj, summary = run_flow(cfg)
    fit = summary["decay_fit"]
    viol = 0
    viol += fit["slope"] >= -0.5
    viol += fit["r_squared"] < 0.99
    viol += summary["max_am_drift"] > 1e-8
    viol += summary["final_d1_to_ref"] > 1e-4
    rows.append(_row("flow", "convergent_run", 4, viol,
                     summary["final_d1_to_ref"], constant=fit["slope"]))

    # normalization equivalence
    cfg_m = FlowConfig(initial=start, dt=0.05, t_end=3.0,
                       normalization="mass_one")
    cfg_a = FlowConfig(initial=start, dt=0.05, t_end=3.0)
    tm, _ = run_flow(cfg_m)
    ta, _ = run_flow(cfg_a)
    worst = 0.0
    for sm, sa in zip(tm, ta):
        diff = sm.potential.values - sa.potential.values
        worst = max(worst, float(np.max(np.abs(diff - np.mean(diff)))))
    mass_worst = max(s.diagnostics["mass_defect"] for s in tm)
    rows.append(_row("flow", "normalization_equivalence", len(tm),
                     int(worst > 1e-6) + int(mass_worst > 1e-8),
                     max(worst, mass_worst)))

    # stability probes
    pots = [s.potential for s in traj[:: max(1, len(traj) // 12)]]
    rep = stability_probe(pots, w1)
    viol = rep["verdict"] != "cauchy"
    synth = [SymplecticPotential(g, -t * start.values, validate=False)
             for t in np.linspace(0.0, 3.0, 8)]
    rep2 = stability_probe(synth, w1)
    viol += rep2["verdict"] != "diverging"
    rows.append(_row("flow", "stability_probe", 2, viol,
                     rep["tail_max_pairwise"]))

    # Ding properness: calibrate on one seed, assert on another
    calib = [M.renormalize(random_potential(g, seed + 13, index=k))
             for k in range(40)]
    consts = ding_properness_probe(calib)["constants"]
    consts = {"A": 1.2 * consts["A"] + 0.1, "B": consts["B"] + 0.1,
              "C": 1.5 * consts["C"] + 0.1,
              "sup_slack": consts["sup_slack"]}
    fresh = [M.renormalize(random_potential(g, seed, index=500_000 + k))
             for k in range(60)]
    rep = ding_properness_probe(fresh, constants=consts)
    viol = sum(rep["violations"].values())
    rows.append(_row("flow", "ding_properness_bounds", 4 * len(fresh), viol,
                     0.0, constant=consts["C"]))
    return rows


SUITES = {
    "weights": suite_weights,
    "orlicz": suite_orlicz,
    "toric": suite_toric,
    "metrics": suite_metrics,
    "epsgeo": suite_epsgeo,
    "flow": suite_flow,
}


def _sandwich_row():
    from .orlicz import sandwich_stats
    stats = sandwich_stats()
    return _row("orlicz", "norm_integral_sandwich", stats["checks"],
                stats["violations"], stats["worst"])


def run_suite(name, trials=None, seed=7, grid=None):
    """Run one suite (or 'all'); appends the global sandwich-counter row."""
    from .orlicz import reset_sandwich_stats
    reset_sandwich_stats()
    names = (("weights", "orlicz", "toric", "metrics", "epsgeo", "flow")
             if name == "all" else (name,))
    rows = []
    for key in names:
        if key not in SUITES:
            raise KeyError(key)
        kwargs = {"seed": seed}
        if trials is not None:
            kwargs["trials"] = trials
        if grid is not None:
            kwargs["grid"] = grid
        rows.extend(SUITES[key](**kwargs))
    rows.append(_sandwich_row())
    return rows
