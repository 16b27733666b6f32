import json
import subprocess
import sys

import numpy as np
import pytest

from trigshear.cli import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, main
from trigshear.storage import read_grid_binary, read_grid_csv, read_sweep_csv


def run(*argv):
    return main([str(a) for a in argv])


def test_usage_errors(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("coeffs", "--j", "", "--out", out) == EXIT_USAGE
    assert run("coeffs", "--j", "5", "--out", out) == EXIT_USAGE
    assert run("synth", "--cartoon", tmp_path / "missing.json", "--out", out) == EXIT_USAGE
    assert run("sweep", "--eps0", "0", "--out", out) == EXIT_USAGE
    assert run("oracle-check", "--degrees", "5", "--out", out) == EXIT_USAGE
    assert run("decay", "--j", "6,8", "--out", out) == EXIT_USAGE
    assert run("frobnicate") == EXIT_USAGE
    assert run("coeffs", "--generator", "cubic", "--out", out) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_synth_outputs(tmp_path):
    out = tmp_path / "s"
    assert run("synth", "--preset", "fig1", "--grid", 64, "--out", out) == EXIT_OK
    a = np.load(out / "cartoon.npy")
    assert a.shape == (64, 64)
    assert (out / "cartoon.pgm").read_bytes().startswith(b"P5\n64 64\n255\n")
    spec = json.loads((out / "cartoon.json").read_text())
    assert [arc["order"] for arc in spec["arcs"]] == [0, 1, 2]
    echo = json.loads((out / "synth-run.json").read_text())
    assert echo["config"]["grid"] == 64
    # the written spec is itself a valid cartoon input
    assert run("synth", "--cartoon", out / "cartoon.json", "--grid", 64, "--out", tmp_path / "s2") == EXIT_OK
    assert np.array_equal(np.load(tmp_path / "s2" / "cartoon.npy"), a)


@pytest.mark.parametrize("j", [4, 6])
def test_all_shears_grid_count(j, tmp_path):
    out = tmp_path / "c"
    assert run("coeffs", "--preset", "chi", "--j", j, "--cones", "h,v", "--all-shears", "--out", out) == EXIT_OK
    assert len(list((out / "coeffs").glob("*.csv"))) == 2 * (2 * 2 ** (j // 2) - 1)
    assert len(list((out / "coeffs").glob("*.bin"))) == 2 * (2 * 2 ** (j // 2) - 1)


def test_rerun_is_byte_identical_and_resumable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ("coeffs", "--preset", "fig1", "--j", "4,6", "--cones", "h", "--l=-2:2")
    assert run(*args, "--out", a, "--threads", 1) == EXIT_OK
    assert run(*args, "--out", b, "--threads", 4) == EXIT_OK
    files = sorted(p.name for p in (a / "coeffs").iterdir())
    assert len(files) == 2 * 5 * 2
    for name in files:
        assert (a / "coeffs" / name).read_bytes() == (b / "coeffs" / name).read_bytes()
    # drop one grid and resume: only it is recomputed
    victim = a / "coeffs" / "h_j06_l+001.csv"
    victim.unlink()
    keep = (a / "coeffs" / "h_j06_l+000.csv").stat().st_mtime_ns
    assert run(*args, "--out", a) == EXIT_OK
    assert victim.read_bytes() == (b / "coeffs" / "h_j06_l+001.csv").read_bytes()
    assert (a / "coeffs" / "h_j06_l+000.csv").stat().st_mtime_ns == keep
    g, gb = read_grid_csv(victim), read_grid_binary(a / "coeffs" / "h_j06_l+001.bin")
    assert np.array_equal(g.values, gb.values)


def test_sweep_outputs(tmp_path):
    out = tmp_path / "w"
    j = 6
    assert run("sweep", "--preset", "fig1", "--j", j, "--out", out) == EXIT_OK
    rows = read_sweep_csv(out / "sweep_j06.csv")
    assert 0 < len(rows) <= 2 * (2 * 2 ** (j // 2) - 1)
    assert all(r.L_max >= r.L_min for r in rows if not r.skipped)
    summary = json.loads((out / "sweep_j06.json").read_text())
    assert summary["rows"] == len(rows) and summary["eps0"] == 0.5
    assert (out / "sweep_j06.dat").read_text().startswith("# cone=")
    assert run("sweep", "--preset", "fig1", "--j", j, "--directed", "both", "--out", out) == EXIT_OK
    both = read_sweep_csv(out / "sweep_j06.csv")
    assert {r.directed for r in both} == {"+", "-"}
    assert len(both) == 2 * len(rows)


def test_decay_outputs(tmp_path):
    out = tmp_path / "d"
    assert run("decay", "--preset", "order0", "--j", "4,6,8", "--oversample", 4, "--out", out) == EXIT_OK
    rep = json.loads((out / "decay.json").read_text())
    assert rep["scales"] == [4, 6, 8]
    tags = [r["tag"] for r in rep["reports"]]
    assert tags == ["arc0", "centre"]
    for r in rep["reports"]:
        assert len(r["series"]) == 3 and np.isfinite(r["slope"])
    lines = (out / "decay.csv").read_text().splitlines()
    assert lines[0] == "tag,kind,expected,slope,order,margin,label" and len(lines) == 3


def test_oracle_check_exit_codes(tmp_path):
    out = tmp_path / "o"
    assert run("oracle-check", "--degrees", "0,1", "--out", out) == EXIT_OK
    rep = json.loads((out / "oracle-check.json").read_text())
    assert rep["failed"] == 0 and rep["max_error"] <= 1e-8
    assert run("oracle-check", "--degrees", "2", "--tol", "1e-17", "--out", out) == EXIT_TOLERANCE
    assert json.loads((out / "oracle-check.json").read_text())["failed"] > 0


def test_config_file_and_flag_override(tmp_path, monkeypatch):
    cfg = tmp_path / "run.json"
    out = tmp_path / "cfgout"
    cfg.write_text(json.dumps({"version": 1, "cartoon": "chi", "scales": [4], "cones": ["v"],
                               "shears": [0, 1], "out": str(out)}))
    monkeypatch.setenv("TRIGSHEAR_THREADS", "3")
    assert run("coeffs", "--config", cfg) == EXIT_OK
    echo = json.loads((out / "coeffs-run.json").read_text())
    assert echo["config"]["threads"] == 3 and echo["config"]["cartoon"] == "chi"
    assert sorted(p.name for p in (out / "coeffs").glob("*.csv")) == ["v_j04_l+000.csv", "v_j04_l+001.csv"]
    assert run("coeffs", "--config", cfg, "--cones", "h", "--threads", 2) == EXIT_OK
    echo = json.loads((out / "coeffs-run.json").read_text())
    assert echo["config"]["cones"] == ["h"] and echo["config"]["threads"] == 2
    cfg.write_text(json.dumps({"version": 2}))
    assert run("coeffs", "--config", cfg) == EXIT_USAGE
    cfg.write_text(json.dumps({"version": 1, "colour": "blue"}))
    assert run("coeffs", "--config", cfg) == EXIT_USAGE
    assert run("coeffs", "--config", tmp_path / "nope.json") == EXIT_USAGE


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "trigshear", "oracle-check", "--degrees", "0",
                        "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0
    assert "checks within" in r.stdout


@pytest.mark.slow
def test_all_shears_grid_count_at_scale_ten(tmp_path):
    out = tmp_path / "c10"
    assert run("coeffs", "--preset", "chi", "--j", 10, "--cones", "h,v", "--all-shears", "--out", out) == EXIT_OK
    assert len(list((out / "coeffs").glob("*.csv"))) == 2 * (2 * 2**5 - 1)
