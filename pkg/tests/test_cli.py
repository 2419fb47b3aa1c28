import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from fracspec.cli import parse_list, parse_number, read_config, run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_example(capsys):
    assert call(capsys, "count", "--d", "2", "--s", "1", "--L", "pi", "--E", "8") == (0, "4\n", "")


def test_riesz_negative_rho(capsys):
    code, out, err = call(capsys, "riesz", "--d", "1", "--s", "1", "--rho", "-1", "--E", "10")
    assert code == 2 and "rho" in err and ">= 0" in err


@pytest.mark.parametrize("argv", [
    ["count", "--d", "2", "--s", "1"],
    ["count", "--d", "2", "--s", "1.5", "--E", "3"],
    ["count", "--d", "0", "--s", "1", "--E", "3"],
    ["count", "--d", "2", "--s", "abc", "--E", "3"],
    ["spectrum", "--d", "2", "--s", "1"],
    ["nosuch"],
    ["semiclassical", "--quantity", "phase-volume", "--d", "2", "--s", "1", "--E", "5", "--mc-samples", "100"],
])
def test_argument_errors(capsys, argv):
    assert call(capsys, *argv)[0] == 2


@pytest.mark.parametrize("text,val", [("pi", math.pi), ("2pi", 2 * math.pi), ("pi/2", math.pi / 2),
                                      ("-pi", -math.pi), ("3*pi/4", 0.75 * math.pi), ("1.5", 1.5),
                                      ("1e-3", 1e-3)])
def test_pi_literals(text, val):
    assert parse_number(text) == pytest.approx(val, rel=1e-15)


def test_parse_list():
    assert parse_list("1,pi") == [1.0, math.pi]
    assert parse_list("geom:1:100:3") == pytest.approx([1, 10, 100])
    assert parse_list("lin:0:1:5")[1] == 0.25


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_parse_number_plain(x):
    assert parse_number(repr(x)) == x


def test_spectrum_csv_json(capsys):
    code, out, _ = call(capsys, "spectrum", "--d", "2", "--s", "1", "--L", "pi", "--k", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# fracspec-csv v1 spectrum" and len(lines) == 7
    code, out, _ = call(capsys, "spectrum", "--d", "2", "--s", "1", "--L", "pi", "--E", "8", "--format", "json")
    assert [r["value"] for r in json.loads(out)["records"]] == [2.0, 5.0, 5.0, 8.0]


def test_sum(capsys):
    code, out, _ = call(capsys, "sum", "--d", "2", "--s", "1", "--L", "pi", "--N", "5")
    assert code == 0 and float(out) == 30.0


def test_riesz_heat_tables(capsys):
    code, out, _ = call(capsys, "riesz", "--d", "2", "--s", "1", "--L", "pi", "--rho", "1", "--E", "9,20")
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "E,rho,R_exact,R_asymptote,R_bound"
    assert float(lines[2].split(",")[2]) == 16.0
    code, out, _ = call(capsys, "heat", "--d", "1", "--s", "1", "--L", "pi", "--t", "1", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert row["Z_exact"] == pytest.approx(0.386319, abs=1e-6)


def test_bounds_scan(capsys, tmp_path):
    out_file = tmp_path / "scan.csv"
    code, out, _ = call(capsys, "bounds-scan", "--d", "2", "--s", "0.6", "--n-max", "50",
                        "--E-grid", "geom:10:1000:4", "--output", str(out_file))
    assert code == 0 and out == ""
    lines = out_file.read_text().splitlines()
    assert len(lines) == 2 + 100 + 8
    assert all(ln.endswith(",1") for ln in lines[2:])


def test_semiclassical(capsys):
    code, out, _ = call(capsys, "semiclassical", "--quantity", "phase-volume", "--d", "2", "--s", "1",
                        "--L", "pi", "--E", "8", "--format", "json")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(2 * math.pi)
    argv = ["semiclassical", "--quantity", "phase-volume", "--d", "2", "--s", "0.75", "--E", "50",
            "--mc-samples", "20000", "--seed", "5"]
    a, b = call(capsys, *argv), call(capsys, *argv)
    assert a == b and a[0] == 0
    code, out, _ = call(capsys, "semiclassical", "--quantity", "gamma-one", "--d", "2", "--s", "0.75",
                        "--format", "json")
    assert json.loads(out)["matches"] == "reduced"


def test_semiclassical_grid_file(capsys, tmp_path):
    import numpy as np
    from fracspec.semiclassical import save_potential_grid

    path = tmp_path / "w.csv"
    save_potential_grid(path, np.full((4, 4), 1.0), (0.25, 0.25), (0.125, 0.125))
    code, out, _ = call(capsys, "semiclassical", "--quantity", "moment-sum", "--d", "2", "--s", "1",
                        "--well", "grid", "--grid-file", str(path), "--format", "json")
    from fracspec.specfun import lieb_thirring_classical_constant
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(lieb_thirring_classical_constant(1, 2, 1), rel=1e-14)


def test_coherent(capsys):
    code, out, _ = call(capsys, "coherent", "--s", "1", "--k", "1", "--hbar", "0.1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "hbar,expectation,limit,gap"
    assert float(lines[1].split(",")[3]) == pytest.approx(0.05, rel=1e-9)


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# cube of side pi\nd = 2\ns = 1\nL = pi\ninclude_zero = false\n")
    assert call(capsys, "count", "--config", str(cfg), "--E", "8")[1] == "4\n"
    # command-line flags override the file
    assert call(capsys, "count", "--config", str(cfg), "--E", "8", "--L", "1")[1] == "0\n"
    assert read_config(cfg) == ["--d", "2", "--s", "1", "--L", "pi"]
    bad = tmp_path / "bad.cfg"
    bad.write_text("d 2\n")
    assert call(capsys, "count", "--config", str(bad), "--E", "8")[0] == 2


def test_threads_env_and_determinism(capsys, monkeypatch):
    argv = ["count", "--d", "3", "--s", "0.75", "--E", "2000"]
    monkeypatch.setenv("FRACSPEC_THREADS", "2")
    a = call(capsys, *argv)
    monkeypatch.setenv("FRACSPEC_THREADS", "1")
    b = call(capsys, *argv)
    assert a == b and a[0] == 0
    assert call(capsys, *argv, "--workers", "2") == a


def test_verify_all_subset(capsys):
    code, out, _ = call(capsys, "verify-all", "--profile", "quick", "--only", "4,8")
    assert code == 0
    assert "PASS criterion 4" in out and "2/2 criteria passed" in out


def test_verify_all_quick_subprocess():
    res = subprocess.run([sys.executable, "-m", "fracspec.cli", "verify-all", "--profile", "quick"],
                         capture_output=True, text=True, timeout=600)
    assert res.returncode == 0, res.stdout + res.stderr
    assert "10/10 criteria passed" in res.stdout
