import csv
import json
import math
import subprocess
import sys

import pytest

from dipolephase.cli import ConfigError, conventions_hash, main, resolve_config


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def load_result(out):
    with open(out / "result.json") as fh:
        return json.load(fh)


def read_table(out):
    with open(out / "table.csv", newline="") as fh:
        return list(csv.reader(fh))


class TestResolveConfig:
    def test_defaults(self):
        cfg = resolve_config({"experiment": "phase"})
        assert cfg["fields"] == {"variant": "wei", "lambda": 1.0, "b0": 1.0}
        assert cfg["loop"]["segments"] == 1000
        assert cfg["seed"] is None

    @pytest.mark.parametrize(
        "doc,path",
        [
            ({"experiment": "phase", "bogus": 1}, "bogus"),
            ({"experiment": "phase", "params": {"alpha": 1}}, "params.alpha"),
            ({"experiment": "phase", "params": {"alpha_pol": float("nan")}}, "params.alpha_pol"),
            ({"experiment": "phase", "fields": {"variant": "wei", "b0": 1}}, "fields.lambda"),
            ({"experiment": "phase", "fields": {"variant": "wei", "lambda": 1}}, "fields.b0"),
            ({"experiment": "phase", "loop": {"orientation": 3}}, "loop.orientation"),
            ({"experiment": "phase", "grid": {"r_min": 0}}, "grid.r_min"),
            ({"experiment": "verify"}, "seed"),
            ({"experiment": "sweep", "sweep": {"axis": "segments", "values": [10, 100]}}, "sweep.values"),
            ({"experiment": "launch"}, "experiment"),
        ],
    )
    def test_errors_name_field_path(self, doc, path):
        with pytest.raises(ConfigError, match=f"^{path.replace('.', '[.]')}"):
            resolve_config(doc)

    def test_volume_charge_lambda(self):
        cfg = resolve_config({"experiment": "phase", "fields": {"variant": "wei", "rho": 1.0, "r0": 2.0, "b0": 1.0}})
        assert cfg["fields"]["lambda"] == 2.0

    def test_overrides(self):
        cfg = resolve_config({"experiment": "phase", "seed": 1}, experiment="verify", seed=5, tolerance=1e-6)
        assert cfg["experiment"] == "verify" and cfg["seed"] == 5 and cfg["tolerance"] == 1e-6


def test_conventions_hash_stable():
    assert conventions_hash() == conventions_hash()
    assert len(conventions_hash()) == 64


def test_phase_run(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "phase",
        "fields": {"variant": "wei", "lambda": 1, "b0": 1},
        "params": {"m": 1, "alpha_pol": 1, "chi": 0, "mu": 0},
        "loop": {"radius": 1, "segments": 1000, "orientation": 1},
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    record = load_result(out)
    c_beta = record["outputs"]["numeric"]["coefficients"]["c_beta"]
    assert c_beta == pytest.approx(-1.5707963, abs=1e-7)
    assert record["config"]["params"]["alpha_pol"] == 1.0
    assert record["conventions_hash"] == conventions_hash()
    assert record["passed"] is True


def test_phase_run_flags_scalar_ab_convention(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "phase",
        "params": {"alpha_pol": 1, "mu": 1},
        "time_leg": {"tau": 2},
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    record = load_result(out)
    assert "beta" in record["outputs"]["scalar_ab_note"]
    coeffs = record["outputs"]["numeric"]["coefficients"]
    assert coeffs["c_betasigma3"] == pytest.approx(2 * math.pi + 2, abs=1e-9)


def test_uniform_phase_has_no_reference(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "phase",
        "fields": {"variant": "uniform", "e": [0.5, 0, 0], "b": [0, 0, 1]},
        "params": {"alpha_pol": 1, "mu": 0.5},
        "loop": {"segments": 50},
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    assert "analytic" not in load_result(out)["outputs"]


def test_verify_run(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "verify", "seed": 42, "verify": {"draws": 100}})
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    outputs = load_result(out)["outputs"]
    assert outputs["max_induced_reduction_deviation"] < 1e-12
    assert outputs["max_dipole_reduction_deviation"] < 1e-12
    assert outputs["clifford_sign"] == -1


def test_verify_tolerance_failure_exit_code(tmp_path):
    out = tmp_path / "out"
    assert main(["verify", "--seed", "1", "--tolerance", "1e-30", "--out", str(out)]) == 2
    assert load_result(out)["passed"] is False


def test_potential_run(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "potential",
        "fields": {"variant": "wei", "lambda": 1, "b0": 1},
        "params": {"alpha_pol": 2},
        "grid": {"r_min": 1, "r_max": 10, "nr": 10, "nphi": 8},
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    rows = read_table(out)
    assert rows[0] == ["r", "inverse_square_coefficient", "beta_alpha2_coefficient"]
    assert float(rows[1][0]) == 1.0 and float(rows[1][1]) == -1.0
    assert float(rows[1][2]) == pytest.approx(-0.5)
    assert float(rows[2][1]) == pytest.approx(-0.25)
    record = load_result(out)
    assert record["outputs"]["scaling_ratio_2r_over_r"] == 0.25
    assert record["outputs"]["attractive"] is True


def test_diagnose_run(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "diagnose-factorization",
        "grid": {"r_min": 0.5, "r_max": 3.0, "nr": 11, "nphi": 16},
        "seed": 3,
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    outputs = load_result(out)["outputs"]
    assert outputs["cross_term_residual"] < 1e-12
    assert abs(outputs["convergence"]["full_slope"] - 4) <= 0.2
    assert len(read_table(out)) == 5


@pytest.mark.parametrize("axis,values", [("segments", [10, 100, 1000]), ("radius", [0.5, 1, 10])])
def test_phase_sweeps(tmp_path, axis, values):
    cfg = write_config(tmp_path, {"experiment": "sweep", "sweep": {"axis": axis, "values": values}, "params": {"alpha_pol": 1, "mu": 0.5}})
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    rows = read_table(out)
    assert rows[0] == ["value", "deviation", "runtime_s"]
    assert len(rows) == 4
    assert all(float(r[1]) < 1e-9 for r in rows[1:])


def test_grid_sweep(tmp_path):
    cfg = write_config(tmp_path, {
        "experiment": "sweep",
        "sweep": {"axis": "grid", "values": [1, 2, 4, 8]},
        "grid": {"r_min": 0.5, "r_max": 3.0, "nr": 11, "nphi": 16},
        "seed": 7,
    })
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out)]) == 0
    assert abs(load_result(out)["outputs"]["slope"] - 4.0) <= 0.2


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "phase", "unknown": 1})
    assert main(["--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "unknown" in capsys.readouterr().err
    assert main(["--config", str(tmp_path / "missing.json")]) == 1


def test_deterministic_output(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "verify", "seed": 42, "verify": {"draws": 20}})
    for name in ("a", "b"):
        assert main(["--config", cfg, "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a" / "result.json").read_bytes() == (tmp_path / "b" / "result.json").read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "dipolephase", "verify", "--seed", "1", "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "result.json").exists()
