import json

import numpy as np
import pytest

from orliczgeo.cli import main
from orliczgeo.sampling import random_function, random_potential
from orliczgeo.toric import make_grid


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    g = make_grid(128)
    random_potential(g, 7, 0).to_csv(d / "u0.csv")
    random_potential(g, 7, 1).to_csv(d / "u1.csv")
    g.lebesgue.to_csv(d / "mu.csv")
    f = random_function(g.lebesgue, 7, 2)
    with open(d / "f.csv", "w") as fh:
        fh.write("node,value\n")
        for x, v in zip(g.y, f):
            fh.write(f"{x:.17e},{v:.17e}\n")
    return d


def test_norm_command(files, capsys):
    code = main(["norm", "--weight", '{"kind":"power","p":2.0}',
                 "--function", str(files / "f.csv"),
                 "--measure", str(files / "mu.csv")])
    assert code == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["norm"] > 0
    assert rep["sandwich_violation"] == 0.0


def test_dist_same_potential_is_zero(files, capsys):
    code = main(["dist", "--weight", '{"kind":"power","p":1.0}',
                 "--u0", str(files / "u0.csv"), "--u1", str(files / "u0.csv")])
    assert code == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["d_chi"] == 0.0


def test_energy_command(files, capsys):
    code = main(["energy", "--weight", '{"kind":"power","p":2.0}',
                 "--u", str(files / "u0.csv")])
    assert code == 0
    rep = json.loads(capsys.readouterr().out)
    assert set(rep) == {"am", "e_chi", "ding_F", "j"}


def test_envelope_and_geodesic_outputs(files, tmp_path):
    out = str(tmp_path / "e_")
    assert main(["envelope", "--u0", str(files / "u0.csv"),
                 "--u1", str(files / "u1.csv"), "--out", out]) == 0
    data = np.loadtxt(out + "envelope.csv", delimiter=",", skiprows=1)
    assert data.shape == (128, 5)
    out = str(tmp_path / "g_")
    assert main(["geodesic", "--u0", str(files / "u0.csv"),
                 "--u1", str(files / "u1.csv"), "--nt", "5",
                 "--out", out]) == 0
    data = np.loadtxt(out + "geodesic.csv", delimiter=",", skiprows=1)
    assert data.shape == (5 * 128, 5)


def test_flow_command(files, tmp_path):
    cfg = {"initial": {"seed": 3, "amplitude": 0.1, "even": True},
           "grid": 128, "dt": 0.05, "t_end": 8.0}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = str(tmp_path / "fl_")
    assert main(["flow", "--config", f"@{path}", "--out", out]) == 0
    summary = json.loads(open(out + "flow_summary.json").read())
    assert summary["passed"]


def test_usage_errors(files, capsys):
    assert main(["norm", "--weight", '{"kind":"nope"}',
                 "--function", str(files / "f.csv"),
                 "--measure", str(files / "mu.csv")]) == 2
    assert main(["flow", "--config", '{"bad": 1}', "--out", "/tmp/x_"]) == 2
    assert main(["dist", "--weight", "not json",
                 "--u0", str(files / "u0.csv"),
                 "--u1", str(files / "u1.csv")]) == 2
    assert main(["verify", "--suite", "flow", "--grid", "32"]) == 2
    capsys.readouterr()


def test_verify_small_suite(tmp_path, capsys):
    out = str(tmp_path / "v_")
    code = main(["verify", "--suite", "weights", "--trials", "5",
                 "--seed", "7", "--out", out])
    capsys.readouterr()
    assert code == 0
    lines = open(out + "verify.csv").read().splitlines()
    assert lines[0].startswith("suite,property,")
    assert all(line.endswith(",1") for line in lines[1:])
