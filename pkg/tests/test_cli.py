"""CLI: exit codes, artifact stamps, determinism, subcommand behavior."""

import json
import math
import subprocess
import sys

import pytest

from steklov_lab.cli import main

TWO_PI = 2.0 * math.pi


def _write_cfg(tmp_path, payload):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(payload))
    return str(path)


LIGHT_OPT = {"n_modes": 16, "solver_N": 64, "grid_points": 512,
             "max_iters": 150}


def test_selftest_passes(tmp_path, capsys):
    assert main(["selftest", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "SELFTEST 8/8 checks passed" in out
    assert "FAIL" not in out
    doc = json.loads((tmp_path / "selftest.json").read_text())
    assert doc["passed"] == doc["total"] == 8
    assert len(doc["config_sha256"]) == 64


def test_selftest_deterministic(tmp_path, capsys):
    main(["selftest", "--out", str(tmp_path / "a")])
    first = capsys.readouterr().out
    main(["selftest", "--out", str(tmp_path / "b")])
    assert capsys.readouterr().out == first
    assert ((tmp_path / "a" / "selftest.json").read_bytes()
            == (tmp_path / "b" / "selftest.json").read_bytes())


def test_selftest_starved_resolution(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {"solver_N": 4})
    code = main(["selftest", "--config", cfg, "--out", str(tmp_path)])
    assert code == 3
    out = capsys.readouterr().out
    assert "kind=resolution" in out
    assert "PASS eigensolver_oracle" in out


def test_spectrum_flat_disk(tmp_path):
    assert main(["spectrum", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0].startswith("# steklov_lab=")
    assert "config_sha256=" in lines[0]
    assert lines[1] == "k,sigma,sigma_bar,block"
    row1 = lines[3].split(",")
    assert abs(float(row1[2]) - TWO_PI) <= 1e-9
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    assert abs(doc["sigma_bar"][1] - TWO_PI) <= 1e-9
    assert abs(doc["sigma_bar"][2] - TWO_PI) <= 1e-9
    assert doc["block"][1] == "cos_odd"
    assert doc["version"]


def test_spectrum_generic_weight(tmp_path):
    cfg = _write_cfg(tmp_path, {"weight_cos": [1.0, 0.3], "N": 48,
                                "k_max": 4})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    assert doc["block"] == [""] * 5
    assert doc["sigma"][0] == pytest.approx(0.0, abs=1e-12)


def test_optimize_writes_trace(tmp_path):
    cfg = _write_cfg(tmp_path, {"params": {"s": 1.0, "t": 8.0},
                                "optimizer": LIGHT_OPT,
                                "weight_cos": [1.0, 0.0, 0.2],
                                "trace": True})
    assert main(["optimize", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "optimize.json").read_text())
    assert doc["E"] < 9.0 / TWO_PI
    assert doc["sigma_bar_2"] == doc["L"]
    lines = (tmp_path / "optimize_trace.csv").read_text().splitlines()
    assert lines[1] == "iteration,E"
    assert len(lines) == doc["iterations"] + 3
    assert float(lines[-1].split(",")[1]) == doc["E"]


def test_optimize_deterministic(tmp_path):
    cfg = _write_cfg(tmp_path, {"params": {"s": 1.0, "t": 5.0},
                                "optimizer": dict(LIGHT_OPT, max_iters=40)})
    main(["optimize", "--config", cfg, "--out", str(tmp_path / "a"),
          "--seed", "7"])
    main(["optimize", "--config", cfg, "--out", str(tmp_path / "b"),
          "--seed", "7"])
    assert ((tmp_path / "a" / "optimize.json").read_bytes()
            == (tmp_path / "b" / "optimize.json").read_bytes())


def test_sweep_rows_and_flags(tmp_path):
    cfg = _write_cfg(tmp_path, {"params": {"s": 1.0},
                                "optimizer": dict(LIGHT_OPT, max_iters=60),
                                "t_grid": [6.0, 8.0]})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[1].split(",")[:2] == ["t", "E"]
    assert len(lines) == 4
    doc = json.loads((tmp_path / "sweep.json").read_text())
    assert [r["t"] for r in doc["rows"]] == [6.0, 8.0]
    # light iteration budget cannot converge; the rows must say so
    assert all(r["flagged"] == (not r["converged"]) or r["flagged"]
               for r in doc["rows"])


def test_sweep_rejects_nonmonotone_grid(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {"t_grid": [5.0, 3.0, 8.0]})
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2
    record = json.loads(capsys.readouterr().err)
    assert record["exit_code"] == 2
    assert record["error"] == "InputDomainError"


def test_config_schema_errors(tmp_path, capsys):
    bad_key = _write_cfg(tmp_path, {"bogus": 1})
    assert main(["optimize", "--config", bad_key,
                 "--out", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"

    bad_opt = _write_cfg(tmp_path, {"optimizer": {"n_nodes": 16}})
    assert main(["optimize", "--config", bad_opt,
                 "--out", str(tmp_path)]) == 2
    capsys.readouterr()

    not_json = tmp_path / "broken.json"
    not_json.write_text("not json {")
    assert main(["optimize", "--config", str(not_json),
                 "--out", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


def test_ellipse_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path, {"p_grid": [0.8]})
    assert main(["ellipse", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "ellipse.csv").read_text().splitlines()
    row = lines[2].split(",")
    assert (int(row[1]), int(row[2])) == (1, 2)
    sbar_low = float(row[3])
    assert sbar_low == pytest.approx(TWO_PI * math.sqrt(0.8), rel=1e-5)


def test_thetastar_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path, {"theta_tolerance": 0.5})
    assert main(["thetastar", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "thetastar.json").read_text())
    assert doc["bracket_lo"] < 3.0 < doc["bracket_hi"]
    assert doc["width"] <= 0.5 + 1e-12
    assert doc["multivalued"] is False


def test_export_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path, {"params": {"s": 1.0, "t": 8.0},
                                "optimizer": dict(LIGHT_OPT, max_iters=400),
                                "weight_cos": [1.0, 0.0, 0.2],
                                "export_resolution": 32})
    assert main(["export", "--config", cfg, "--out", str(tmp_path)]) == 0
    obj = (tmp_path / "immersion.obj").read_text().splitlines()
    assert obj[0].startswith("# steklov_lab=")
    assert any(line.startswith("v ") for line in obj)
    rim = (tmp_path / "boundary.csv").read_text().splitlines()
    assert rim[0].startswith("# steklov_lab=")
    assert rim[1] == "theta,x0,x1,x2"
    doc = json.loads((tmp_path / "export.json").read_text())
    assert doc["diagnostics"]["winding"] == 1
    assert tuple(doc["diagnostics"]["nodal_counts"]) == (2, 2, 3)
    assert 0.0 < doc["ellipsoid_p"] < 1.0


def test_io_failure_exit_code(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    code = main(["spectrum", "--out", str(blocker / "sub")])
    assert code == 5
    assert json.loads(capsys.readouterr().err)["exit_code"] == 5


def test_seed_must_fit_u64(tmp_path, capsys):
    assert main(["optimize", "--seed", "-1", "--out", str(tmp_path)]) == 2
    capsys.readouterr()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "steklov_lab.cli", "spectrum",
         "--out", str(tmp_path), "--threads", "1"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert (tmp_path / "spectrum.csv").exists()
