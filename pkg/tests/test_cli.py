from __future__ import annotations

import csv
import json
import math
import subprocess
import sys

import pytest

from polyboltz import spectral as sp
from polyboltz.cli import NU_HEADER, main

COARSE_INI = """
[quad]
n_interval = 6
n_semi = 4
sphere_order = 5
n_plane_radial = 6
n_plane_angular = 4
n_chi = 4
n_energy = 4
n_mu = 4
n_rr = 4
[grid]
isotropic = 5x4
full = 3x6x2
[run]
samples = 50
mc_samples = 20000
"""


@pytest.fixture
def coarse_ini(tmp_path):
    p = tmp_path / "coarse.ini"
    p.write_text(COARSE_INI)
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_nu_table(tmp_path, capsys):
    out = tmp_path / "nu.csv"
    code, _, err = run(["nu", "--grid", "0,2x0.5,1", "--out", str(out)], capsys)
    assert code == 0, err
    rows = read_csv(out)
    assert rows[0] == NU_HEADER
    assert len(rows) == 5
    s, I, gen, red, lo, up = map(float, rows[1])
    assert (s, I) == (0.0, 0.5)
    assert red == pytest.approx(gen, rel=5e-3)
    assert lo == pytest.approx(gen / (1 + math.sqrt(0.5)), rel=1e-14)


def test_nu_closed_form_alpha2(tmp_path, capsys):
    out = tmp_path / "nu.csv"
    assert run(["nu", "--alpha", "2", "--grid", "0,3x1", "--out", str(out)], capsys)[0] == 0
    for row in read_csv(out)[1:]:
        assert float(row[2]) == pytest.approx(16 * math.pi / 15, rel=1e-6)


def test_nu_empty_grid(tmp_path, capsys):
    out = tmp_path / "nu.csv"
    code, _, err = run(["nu", "--grid", "x1,2", "--out", str(out)], capsys)
    assert code == 1 and "empty" in err
    assert not out.exists()


def test_nu_route_disagreement(tmp_path, capsys):
    ini = tmp_path / "crude.ini"
    ini.write_text("[quad]\nn_interval = 2\nn_semi = 2\nn_mu = 2\nn_rr = 2\n")
    out = tmp_path / "nu.csv"
    code, _, err = run(["nu", "--config", str(ini), "--out", str(out)], capsys)
    assert code == 2 and "disagree" in err
    assert len(read_csv(out)) == 21
    # a looser tolerance scale accepts the same table
    assert run(["nu", "--config", str(ini), "--out", str(out), "--tol-scale", "20"], capsys)[0] == 0


def test_nu_other_models_have_no_reduced_route(tmp_path, capsys):
    ini = tmp_path / "m2.ini"
    ini.write_text("[model]\nvariant = GP20Model2\n")
    out = tmp_path / "nu.csv"
    assert run(["nu", "--config", str(ini), "--grid", "1x1", "--out", str(out)], capsys)[0] == 0
    row = read_csv(out)[1]
    assert math.isnan(float(row[3])) and float(row[2]) > 0


@pytest.mark.parametrize("grid", ["1,2", "a,bx1", "-1x1", "1x0"])
def test_nu_bad_grid(grid, capsys):
    assert run(["nu", f"--grid={grid}"], capsys)[0] == 2


def test_kernel(capsys):
    code, out, _ = run(["kernel", "--x", "1,0,0,0.5", "--y=-1,0,0,0.5"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["k1"] == pytest.approx(0.1106953326454919, rel=1e-12)
    assert rep["k"] == pytest.approx(rep["k2"] - rep["k1"], rel=1e-14)
    assert run(["kernel", "--x", "1,0,0", "--y", "0,0,0,1"], capsys)[0] == 2
    assert run(["kernel", "--x", "0,0,0,1", "--y", "0,0,0,1"], capsys)[0] == 2


def test_assemble_is_deterministic(tmp_path, coarse_ini, capsys):
    a, b = tmp_path / "a.blop", tmp_path / "b.blop"
    code, out, _ = run(["assemble", "--config", coarse_ini, "--out", str(a)], capsys)
    assert code == 0
    stats = json.loads(out)
    assert set(stats) >= {"path", "mode", "dims", "nodes", "entries", "kernel_pairs", "wall_seconds",
                          "entries_per_second", "sha256"}
    assert stats["nodes"] == 20 and stats["entries"] == 400
    code, out, _ = run(["assemble", "--config", coarse_ini, "--out", str(b), "--workers", "2"], capsys)
    assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(out)["sha256"] == stats["sha256"] == sp.read_blop(a).checksum()


def test_assemble_full_and_spectrum(tmp_path, coarse_ini, capsys):
    op = tmp_path / "f.blop"
    code, out, _ = run(["assemble", "--config", coarse_ini, "--mode", "full", "--out", str(op)], capsys)
    assert code == 0 and json.loads(out)["dims"] == [3, 6, 2]
    rep = tmp_path / "spec.json"
    code, out, _ = run(["spectrum", "--in", str(op), "--out", str(rep)], capsys)
    assert code == 0
    data = json.loads(rep.read_text())
    assert data["mode"] == "full" and len(data["eigenvalues_L"]) == 36
    assert data["eigenvalues_L"] == sorted(data["eigenvalues_L"], reverse=True)
    assert set(data["null_residuals"]) == {"mass", "px", "py", "pz", "energy"}
    assert run(["spectrum", "--in", str(tmp_path / "missing.blop")], capsys)[0] == 2


def test_default_output_dir(tmp_path, coarse_ini, capsys):
    ini = tmp_path / "withdir.ini"
    ini.write_text(open(coarse_ini).read() + f"[output]\ndir = {tmp_path}\n")
    assert run(["assemble", "--config", str(ini)], capsys)[0] == 0
    assert (tmp_path / "operator_isotropic.blop").exists()


def test_qcheck_passes_and_injected_fault_fails(tmp_path, coarse_ini, capsys):
    out = tmp_path / "q.json"
    code, _, err = run(["qcheck", "--config", coarse_ini, "--out", str(out)], capsys)
    assert code == 0, err
    rep = json.loads(out.read_text())
    assert rep["passed"] and rep["suite"] == "q"
    names = [c["name"] for c in rep["checks"]]
    assert any(n.startswith("q.entropy_sign") for n in names)
    code, _, err = run(["qcheck", "--config", coarse_ini, "--inject-negative-C"], capsys)
    assert code == 1
    assert "FAILED q.entropy_sign" in err


def test_verify_mc_artifacts_are_bitwise_identical(tmp_path, coarse_ini, capsys):
    paths = [tmp_path / "v1.json", tmp_path / "v2.json"]
    codes = [run(["verify", "--config", coarse_ini, "--suite", "spectral", "--seed", "3", "--out", str(p)],
                 capsys)[0] for p in paths]
    assert codes[0] == codes[1]
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rep = json.loads(paths[0].read_text())
    assert any(c["name"] == "spectral.weak_oracle" for c in rep["checks"])


def test_verify_kinematics(tmp_path, capsys):
    out = tmp_path / "k.json"
    code, _, _ = run(["verify", "--suite", "kinematics", "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["n_failed"] == 0 and rep["n_checks"] >= 4


def test_usage_errors(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[gas]\ncolour = blue\n")
    code, _, err = run(["nu", "--config", str(bad)], capsys)
    assert code == 2 and "unknown key" in err
    assert run(["nu", "--workers", "0"], capsys)[0] == 2
    assert run(["nu", "--tol-scale", "-1"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "bogus"])
    assert exc.value.code == 2


def test_environment_config(tmp_path, monkeypatch, capsys):
    ini = tmp_path / "env.ini"
    ini.write_text("[model]\nalpha = 2\n")
    monkeypatch.setenv("POLYBOLTZ_CONFIG", str(ini))
    out = tmp_path / "nu.csv"
    assert run(["nu", "--grid", "1x1", "--out", str(out)], capsys)[0] == 0
    assert float(read_csv(out)[1][2]) == pytest.approx(16 * math.pi / 15, rel=1e-6)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "polyboltz", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "assemble" in res.stdout
