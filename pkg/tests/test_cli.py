import json
import os
import subprocess
import sys

import pytest

from voigtlab.cli import csv_text, main

GOOD = """\
kmax = 1
nu = 0.5
alpha = 1.0
s = 1.0
dt = 0.02
t_final = 2.0
seed = 11
forcing = random
forcing_amplitude = 0.5
initial_radius = 0.3
sample_every = 5
"""

BLOWUP = """\
kmax = 2
nu = 0.001
alpha = 0.001
s = 1.0
dt = 5.0
t_final = 200.0
seed = 1
forcing = random
forcing_amplitude = 1e6
initial_radius = 1e6
"""


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    run = tmp_path / "cwd"
    run.mkdir()
    monkeypatch.chdir(run)
    return run


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_constants(workdir, capsys):
    assert main(["constants", "--out", "o"]) == 0
    assert "c_1_clr" in capsys.readouterr().out
    assert {p.name for p in (workdir / "o").iterdir()} == {
        "constants.txt", "constants.json", "manifest.json"}
    man = json.loads((workdir / "o" / "manifest.json").read_text())
    assert man["command"] == "constants" and "kernel_backend" in man


def test_bounds_zero_grashof(workdir, capsys):
    assert main(["bounds", "--s", "1", "--G", "0", "--G1", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["best"]["value"] == 0.0
    assert os.listdir(workdir) == []


def test_bounds_all_lists_est3_off_s_one(capsys):
    assert main(["bounds", "--s", "0.8", "--G", "2", "--G1", "0.5", "--all"]) == 0
    doc = json.loads(capsys.readouterr().out)
    est3 = [r for r in doc["reports"] if r["theorem_id"] == "est3"]
    assert len(est3) == 1 and not est3[0]["applicable"]
    assert doc["best"]["theorem_id"] != "est3"


def test_zeta_sweep(workdir):
    assert main(["zeta", "--spectrum", "torus", "--kmax", "2", "--alpha", "1", "--s", "1",
                 "--N", "10", "--sweep", "--out", "z"]) == 0
    lines = (workdir / "z" / "zeta.csv").read_text().splitlines()
    assert lines[0] == "N,zeta,zeta_hat,gest_margin,ggest_margin,gest1_margin"
    assert len(lines) == 11 and lines[1].startswith("1,0.5,0.5,")


def test_verify_zeta(workdir, capsys):
    assert main(["verify", "--suite", "zeta", "--trials", "100", "--seed", "7"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["min_margin"] >= 0 and doc["violations"] == []


def test_verify_requires_seed(capsys):
    assert main(["verify", "--suite", "zeta", "--trials", "10"]) == 2
    assert "seed" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["bounds", "--s", "1"],
                                  ["bounds", "--s", "x", "--G", "1", "--G1", "1"],
                                  ["bounds", "--s", "0.3", "--G", "1", "--G1", "1"],
                                  ["traces", "--config", "missing.cfg", "--nmax", "3"]])
def test_usage_errors(workdir, argv):
    assert main(argv) == 2


def test_bad_config(workdir, tmp_path):
    cfg = write(tmp_path / "bad.cfg", GOOD + "viscosity = 2\n")
    assert main(["simulate", "--config", cfg, "--out", "o"]) == 2
    cfg = write(tmp_path / "noseed.cfg", GOOD.replace("seed = 11\n", ""))
    assert main(["simulate", "--config", cfg]) == 2


def test_blowup_exit(tmp_path, capsys):
    cfg = write(tmp_path / "blow.cfg", BLOWUP)
    assert main(["simulate", "--config", cfg]) == 4
    assert "blow-up" in capsys.readouterr().err


def test_simulate_outputs_and_determinism(workdir, tmp_path):
    cfg = write(tmp_path / "run.cfg", GOOD)
    assert main(["simulate", "--config", cfg, "--out", "a"]) == 0
    assert main(["simulate", "--config", cfg, "--out", "b"]) == 0
    a = (workdir / "a" / "timeseries.csv").read_bytes()
    assert a == (workdir / "b" / "timeseries.csv").read_bytes()
    rows = a.decode().splitlines()
    assert rows[0] == "t,energy,voigt_energy,enstrophy,forcing_pairing"
    assert len(rows) == 1 + 21
    assert sorted(os.listdir(workdir)) == ["a", "b"]


def test_traces(workdir, tmp_path, capsys):
    cfg = write(tmp_path / "run.cfg", GOOD)
    assert main(["traces", "--config", cfg, "--nmax", "12", "--out", "t"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert {"n_star", "bound_ceiling", "consistent", "split_half_discrepancy"} <= set(summary)
    lines = (workdir / "t" / "q_curve.csv").read_text().splitlines()
    assert lines[0] == "N,q,q_firsthalf,q_secondhalf" and len(lines) == 13
    assert main(["traces", "--config", cfg, "--nmax", "13"]) == 2


def test_reproduce_fault_injection(workdir, capsys):
    assert main(["reproduce", "--only", "1", "--inject-fault", "--out", "r"]) == 3
    out = capsys.readouterr().out
    assert out.startswith("AC1  FAIL")
    doc = json.loads((workdir / "r" / "report.json").read_text())
    assert doc["fault_injected"] and not doc["all_passed"]


def test_reproduce_fast_criteria(workdir, capsys):
    assert main(["reproduce", "--only", "1", "10", "--out", "r"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [l[:9] for l in lines] == ["AC1  PASS", "AC10 PASS"]
    names = set(os.listdir(workdir / "r"))
    assert {"report.json", "manifest.json"} <= names
    assert any(n.startswith("ac01_") for n in names)


def test_csv_is_round_trip_exact():
    x = 0.1 + 0.2
    text = csv_text(("a", "b", "c"), [(x, None, True)])
    assert text == "a,b,c\n0.30000000000000004,,true\n"
    assert float(text.splitlines()[1].split(",")[0]) == x


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "voigtlab", "--version"], cwd=tmp_path,
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("voigtlab ")
    assert os.listdir(tmp_path) == []
