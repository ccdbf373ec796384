"""Command-line front end: norms, distances, energies, envelopes, geodesics,
eps-geodesics, flow runs, and the verify property-suite runner.

Exit codes: 0 success / all properties pass, 1 property failure, 2 usage or
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import metrics as M
from .epsgeodesic import (SolverError, chi_length, laplacian_bound_probe,
                          solve_eps_geodesic, sup_distance_to_geodesic)
from .flow import FlowConfig, FlowError, run_flow
from .measure import DiscreteMeasure, MeasureError
from .orlicz import OrliczError, gauge_norm_report
from .sampling import random_potential
from .toric import (SymplecticPotential, ToricError, make_grid, max_potential,
                    rooftop, weak_geodesic)
from .verify import run_suite
from .weights import WeightError, weight_from_spec

__all__ = ["main", "random_potential"]

_FLOW_FIELDS = {"initial", "grid", "dt", "t_end", "normalization",
                "fit_start", "schema_version"}
_INITIAL_FIELDS = {"path", "seed", "index", "amplitude", "even"}


class UsageError(ValueError):
    """Bad flags or malformed configuration."""


def _load_json(text):
    """Inline JSON or @path indirection."""
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return json.load(fh)
    return json.loads(text)


def _load_weight(text):
    return weight_from_spec(_load_json(text))


def _load_function(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, -1]


def _write_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=True)
    if path is None:
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.17e}" if isinstance(x, float) else str(x)
                              for x in row) + "\n")


def _out(args, suffix):
    if args.out is None:
        raise UsageError("this command requires --out <prefix>")
    return f"{args.out}{suffix}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_norm(args):
    w = _load_weight(args.weight)
    f = _load_function(args.function)
    mu = DiscreteMeasure.from_csv(args.measure)
    info = gauge_norm_report(f, w, mu)
    report = {
        "norm": info["norm"],
        "integral": info["integral"],
        "iterations": info["iterations"],
        "bracket_low": info["bracket"][0],
        "bracket_high": info["bracket"][1],
        "sandwich_violation": info["sandwich_violation"],
    }
    _write_json(report, args.out and _out(args, "norm.json"))
    return 0


def _cmd_dist(args):
    w = _load_weight(args.weight)
    u0 = SymplecticPotential.from_csv(args.u0)
    u1 = SymplecticPotential.from_csv(args.u1)
    from .orlicz import reset_sandwich_stats, sandwich_stats
    reset_sandwich_stats()
    report = {
        "d_chi": M.d_chi(u0, u1, w),
        "i_chi": M.i_chi_energy(u0, u1, w),
        "sandwich": sandwich_stats(),
    }
    _write_json(report, args.out and _out(args, "dist.json"))
    return 0


def _cmd_energy(args):
    w = _load_weight(args.weight)
    u = SymplecticPotential.from_csv(args.u)
    un = M.renormalize(u)
    ding_f, j = M.ding_and_j(un)
    report = {
        "am": M.am_energy(u),
        "e_chi": M.e_chi_energy(u, w),
        "ding_F": ding_f,
        "j": j,
    }
    _write_json(report, args.out and _out(args, "energy.json"))
    return 0


def _cmd_envelope(args):
    u0 = SymplecticPotential.from_csv(args.u0)
    u1 = SymplecticPotential.from_csv(args.u1)
    roof = rooftop(u0, u1)
    mx = max_potential(u0, u1)
    y = u0.grid.y
    rows = [(float(y[j]), float(roof.values[j]), float(roof.dual[j]),
             float(mx.values[j]), float(mx.dual[j])) for j in range(len(y))]
    _write_csv(_out(args, "envelope.csv"),
               "y,rooftop_value,rooftop_dual,max_value,max_dual", rows)
    return 0


def _cmd_geodesic(args):
    u0 = SymplecticPotential.from_csv(args.u0)
    u1 = SymplecticPotential.from_csv(args.u1)
    seg = weak_geodesic(u0, u1)
    y = u0.grid.y
    rows = []
    for t in np.linspace(0.0, 1.0, args.nt):
        ut = seg.evaluator(float(t))
        s = ut.s_nodes
        phi = s * y - ut.dual
        for j in range(len(y)):
            rows.append((float(t), float(y[j]), float(ut.values[j]),
                         float(s[j]), float(phi[j])))
    _write_csv(_out(args, "geodesic.csv"), "t,y,dual_value,s,primal", rows)
    return 0


def _cmd_epsgeo(args):
    u0 = SymplecticPotential.from_csv(args.u0)
    u1 = SymplecticPotential.from_csv(args.u1)
    w = _load_weight(args.weight)
    eps_list = [float(e) for e in args.eps.split(",")]
    d = M.d_chi(u0, u1, w)
    report = {"d_chi": d, "sweep": []}
    for eps in eps_list:
        field = solve_eps_geodesic(u0, u1, eps, nt=args.nt, ns=args.ns)
        length = chi_length(field, w)
        report["sweep"].append({
            "eps": eps,
            "chi_length": length,
            "length_gap_rel": abs(length - d) / max(d, 1e-300),
            "sup_distance_to_geodesic": sup_distance_to_geodesic(field),
            "laplacian_probe": laplacian_bound_probe(field),
        })
        rows = []
        for i, ti in enumerate(field.t):
            for j, sj in enumerate(field.s):
                rows.append((float(ti), float(sj), float(field.values[i, j])))
        _write_csv(_out(args, f"epsgeo_{eps:g}.csv"), "t,s,u", rows)
    _write_json(report, _out(args, "epsgeo.json"))
    return 0


def _parse_flow_config(cfg):
    if not isinstance(cfg, dict):
        raise UsageError("flow config must be a JSON object")
    unknown = set(cfg) - _FLOW_FIELDS
    if unknown:
        raise UsageError(f"unknown flow config fields: {sorted(unknown)}")
    grid_n = int(cfg.get("grid", 512))
    initial = cfg.get("initial", {})
    if isinstance(initial, str):
        u0 = SymplecticPotential.from_csv(initial)
    elif isinstance(initial, dict):
        unknown = set(initial) - _INITIAL_FIELDS
        if unknown:
            raise UsageError(f"unknown initial fields: {sorted(unknown)}")
        if "path" in initial:
            u0 = SymplecticPotential.from_csv(initial["path"])
        else:
            u0 = random_potential(make_grid(grid_n),
                                  int(initial.get("seed", 7)),
                                  index=int(initial.get("index", 0)),
                                  amplitude=float(initial.get("amplitude", 0.15)),
                                  even=bool(initial.get("even", True)))
    else:
        raise UsageError("flow config field 'initial' must be a path or object")
    u0 = M.renormalize(u0)
    zero = SymplecticPotential(u0.grid, np.zeros(u0.grid.n), validate=False)
    return FlowConfig(
        initial=u0,
        dt=float(cfg.get("dt", 0.05)),
        t_end=float(cfg.get("t_end", 20.0)),
        normalization=cfg.get("normalization", "am_zero"),
        reference_ke=zero,
        fit_start=float(cfg.get("fit_start", 1.0)),
    )


def _cmd_flow(args):
    cfg = _parse_flow_config(_load_json(args.config))
    traj, summary = run_flow(cfg)
    rows = []
    for st in traj:
        d = st.diagnostics
        rows.append((float(st.time), d["sup_rdot"], d["am"], d["ding_F"],
                     d["j"], d.get("d1_to_ref", float("nan"))))
    _write_csv(_out(args, "flow.csv"), "t,sup_rdot,am,ding_F,j,d1_to_ref", rows)
    fit = summary["decay_fit"]
    passed = (fit["r_squared"] >= 0.99 and fit["slope"] < 0.0
              and summary["final_sup_rdot"] < 1e-6
              and (summary["max_am_drift"] is None
                   or summary["max_am_drift"] <= 1e-8))
    summary["passed"] = bool(passed)
    _write_json(summary, _out(args, "flow_summary.json"))
    return 0 if passed else 1


def _cmd_verify(args):
    rows = run_suite(args.suite, trials=args.trials, seed=args.seed,
                     grid=args.grid)
    out_rows = [(r["suite"], r["property"], r["trials"], r["violations"],
                 float(r["max_violation"]), float(r["empirical_constant"]),
                 int(r["passed"])) for r in rows]
    header = "suite,property,trials,violations,max_violation,empirical_constant,passed"
    path = _out(args, "verify.csv") if args.out else None
    if path is None:
        print(header)
        for row in out_rows:
            print(",".join(f"{x:.17e}" if isinstance(x, float) else str(x)
                           for x in row))
    else:
        _write_csv(path, header, out_rows)
    return 0 if all(r["passed"] for r in rows) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser():
    ap = argparse.ArgumentParser(
        prog="orliczgeo",
        description="Orlicz-Finsler geometry laboratory on the toric "
                    "projective line")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        p.add_argument("--out", default=None,
                       help="output path prefix (files are written as "
                            "<prefix><name>)")
        return p

    p = add("norm", _cmd_norm, help="gauge norm of sampled function")
    p.add_argument("--weight", required=True,
                   help="weight JSON, inline or @file")
    p.add_argument("--function", required=True, help="CSV of samples")
    p.add_argument("--measure", required=True, help="CSV node,weight")

    p = add("dist", _cmd_dist, help="d_chi and I_chi between two potentials")
    p.add_argument("--weight", required=True)
    p.add_argument("--u0", required=True, help="potential CSV y,dual_value")
    p.add_argument("--u1", required=True)

    p = add("energy", _cmd_energy, help="AM, E_chi, Ding F, J of a potential")
    p.add_argument("--weight", required=True)
    p.add_argument("--u", required=True, help="potential CSV y,dual_value")

    p = add("envelope", _cmd_envelope,
            help="rooftop and max envelopes of two potentials")
    p.add_argument("--u0", required=True)
    p.add_argument("--u1", required=True)

    p = add("geodesic", _cmd_geodesic,
            help="t-indexed samples of the dual-linear geodesic")
    p.add_argument("--u0", required=True)
    p.add_argument("--u1", required=True)
    p.add_argument("--nt", type=int, default=11)

    p = add("epsgeo", _cmd_epsgeo, help="eps-geodesic solve and sweep report")
    p.add_argument("--u0", required=True)
    p.add_argument("--u1", required=True)
    p.add_argument("--eps", required=True,
                   help="epsilon value or comma-separated sweep")
    p.add_argument("--weight", default='{"kind":"power","p":2.0}')
    p.add_argument("--nt", type=int, default=64)
    p.add_argument("--ns", type=int, default=384)

    p = add("flow", _cmd_flow, help="Ricci flow run from a config JSON")
    p.add_argument("--config", required=True, help="config JSON, inline or @file")

    p = add("verify", _cmd_verify, help="run a property suite")
    p.add_argument("--suite", default="all",
                   choices=["all", "weights", "orlicz", "toric", "metrics",
                            "epsgeo", "flow"])
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--grid", type=int, default=None)
    return ap


def main(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if getattr(args, "trials", None) is not None and args.trials < 1:
        print("error: trials must be >= 1", file=sys.stderr)
        return 2
    if getattr(args, "grid", None) is not None and args.grid < 64:
        print("error: grid must be >= 64", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (UsageError, WeightError, MeasureError, ToricError,
            json.JSONDecodeError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, FlowError, OrliczError, M.MetricsError,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
