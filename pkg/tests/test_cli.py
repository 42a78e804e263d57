import json
import subprocess
import sys

import pytest
from jsonschema import validate

from abjm_vortex import cli
from abjm_vortex.io import load_schema, read_table


def call(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_flux2(tmp_path, capsys):
    code, out, _ = call(capsys, "solve", "--target-flux2", 2.5, "--verify", "--out-dir", tmp_path)
    assert code == cli.EXIT_OK and "verdict=integrable" in out
    rep = json.loads((tmp_path / "solve_report.json").read_text())
    validate(rep, load_schema())
    assert abs(rep["flux2_over_2pi"] - 2.5) <= 1e-4
    assert rep["verification"]["abs_diff"] < 1e-5
    for name in ("profile.csv", "fields.csv"):
        assert (tmp_path / name).stat().st_size > 0


def test_solve_json_to_stdout(tmp_path, capsys):
    code, out, _ = call(capsys, "solve", "--alpha", 5, "--format", "json", "--out-dir", tmp_path)
    assert code == 0 and json.loads(out)["verdict"] == "integrable"


def test_single_divergent_shot(tmp_path, capsys):
    code, out, _ = call(capsys, "solve", "--alpha", -15, "--out-dir", tmp_path)
    assert code == 0 and "verdict=divergent" in out
    rep = json.loads((tmp_path / "solve_report.json").read_text())
    assert rep["energy"]["canonical"] is None and "energy.canonical" in rep["null_reasons"]


@pytest.mark.parametrize("argv", [
    ["solve", "--target-flux2", "2.0"],
    ["solve"],
    ["solve", "--alpha", "1", "--target-flux2", "2.5"],
    ["solve", "--alpha", "1", "--n1", "0"],
    ["solve", "--bogus"],
    ["scan", "--alpha-min", "1"],
    ["scan", "--alpha-min", "1", "--alpha-max", "0"],
    ["baseline", "--r-min", "2", "--r-max", "1"],
    ["perturb", "--eps-list", "a,b"],
    ["nosuch"],
])
def test_bad_arguments(tmp_path, capsys, argv):
    code, _, err = call(capsys, *argv, *(["--out-dir", tmp_path] if argv[0] != "nosuch" else []))
    assert code == cli.EXIT_BAD_ARGS and "error:" in err


def test_unreachable_exit_code(tmp_path, capsys, monkeypatch):
    def never(*a, **k):
        raise cli.TargetUnreachable("no sign change")
    monkeypatch.setattr(cli, "solve_target", never)
    code, _, err = call(capsys, "solve", "--target-flux2", 2.5, "--out-dir", tmp_path)
    assert code == cli.EXIT_UNREACHABLE and "unreachable" in err


def test_inconclusive_exit_code(tmp_path, capsys, monkeypatch):
    def vague(*a, **k):
        raise cli.PrecisionError("inconclusive")
    monkeypatch.setattr(cli, "solve_target", vague)
    code, _, _ = call(capsys, "solve", "--target-flux2", 2.5, "--out-dir", tmp_path)
    assert code == cli.EXIT_INCONCLUSIVE


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"r-min": 0.5, "r_max": 2.0, "points": 7}))
    code, _, _ = call(capsys, "baseline", "--config", cfg, "--points", 3, "--out-dir", tmp_path)
    assert code == 0
    t = read_table(tmp_path / "baseline.csv", ("r", "u0", "v0", "eu0", "ev0", "rho", "phi0", "psi0"))
    assert t["r"].size == 3 and t["r"][0] == pytest.approx(0.5) and t["r"][-1] == pytest.approx(2.0)


@pytest.mark.parametrize("text", ['{"no_such_key": 1}', "not json", "[1]"])
def test_bad_config(tmp_path, capsys, text):
    cfg = tmp_path / "c.json"
    cfg.write_text(text)
    code, _, _ = call(capsys, "baseline", "--config", cfg, "--out-dir", tmp_path)
    assert code == cli.EXIT_BAD_ARGS


def test_baseline_output(tmp_path, capsys):
    code, out, _ = call(capsys, "baseline", "--out-dir", tmp_path)
    assert code == 0 and "sigma2=7.25519745" in out and "mass=6.0" in out


def test_perturb_output(tmp_path, capsys):
    code, out, _ = call(capsys, "perturb", "--eps-list", "0.1,0.05", "--out-dir", tmp_path)
    assert code == 0
    assert (tmp_path / "perturb.csv").read_text().count("\n") == 3


def test_scan_jobs_byte_identical(tmp_path, capsys):
    args = ("scan", "--alpha-min", -6, "--alpha-max", 10, "--alpha-steps", 5)
    assert call(capsys, *args, "--jobs", 1, "--out-dir", tmp_path / "a")[0] == 0
    assert call(capsys, *args, "--jobs", 3, "--out-dir", tmp_path / "b")[0] == 0
    for name in ("scan.csv", "flux_region.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_check_round_trip(tmp_path, capsys):
    assert call(capsys, "solve", "--target-flux2", 2.8, "--out-dir", tmp_path)[0] == 0
    solve = json.loads((tmp_path / "solve_report.json").read_text())
    code, out, _ = call(capsys, "check", tmp_path / "profile.csv", "--report", tmp_path / "solve_report.json",
                        "--out-dir", tmp_path)
    assert code == 0 and "flags_failed=none" in out
    chk = json.loads((tmp_path / "check_report.json").read_text())
    validate(chk, load_schema())
    assert chk["pohozaev"] == solve["pohozaev"]
    assert chk["F2_inf"] == solve["F2_inf"]


def test_check_truncated_profile(tmp_path, capsys):
    assert call(capsys, "solve", "--alpha", 5, "--out-dir", tmp_path)[0] == 0
    lines = (tmp_path / "profile.csv").read_text().splitlines()
    lines[10] = lines[10][: len(lines[10]) // 3]
    (tmp_path / "cut.csv").write_text("\n".join(lines[:11]) + "\n")
    code, _, err = call(capsys, "check", tmp_path / "cut.csv", "--out-dir", tmp_path)
    assert code == cli.EXIT_BAD_INPUT and "cut.csv:11" in err


def test_check_bad_report(tmp_path, capsys):
    assert call(capsys, "solve", "--alpha", 5, "--out-dir", tmp_path)[0] == 0
    (tmp_path / "junk.json").write_text("{}")
    code, _, _ = call(capsys, "check", tmp_path / "profile.csv", "--report", tmp_path / "junk.json",
                      "--out-dir", tmp_path)
    assert code == cli.EXIT_BAD_INPUT


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "abjm_vortex", "baseline", "--points", "5",
                          "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0 and "mass=" in res.stdout
