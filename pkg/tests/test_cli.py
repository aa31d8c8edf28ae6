import json
import subprocess
import sys

import pytest

from aircomp_fa.cli import EXIT_CONFIG, EXIT_OK, EXIT_USAGE, main

REPO_CONFIGS = __import__("pathlib").Path(__file__).resolve().parent.parent / "configs"


def small_sweep_spec(tmp_path, geometries=2):
    spec = {
        "base": {"num_users": 3, "min_spacing": 0.5},
        "theta0_grid": [0.0, 0.2],
        "snr_db_grid": [10.0],
        "antenna_counts": [3],
        "aperture_lengths": [4.0],
        "num_geometries": geometries,
        "rng_seed": 5,
        "schemes": ["proposed", "fixed_position"],
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return path


class TestSolveCommand:
    def test_trivial_config_reaches_wiener_mse(self, tmp_path):
        out = tmp_path / "solution.json"
        code = main([
            "solve", "--config", str(REPO_CONFIGS / "single_user.json"), "--out", str(out)
        ])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["mse"]["total"] == pytest.approx(0.5, abs=1e-9)
        assert payload["trace"]["converged"] is True
        assert len(payload["solution"]["positions"]) == 1

    def test_missing_config_file(self, tmp_path):
        code = main(["solve", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o.json")])
        assert code == EXIT_CONFIG

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = main(["solve", "--config", str(bad), "--out", str(tmp_path / "o.json")])
        assert code == EXIT_CONFIG

    def test_infeasible_config(self, tmp_path):
        config = json.loads((REPO_CONFIGS / "single_user.json").read_text())
        config["num_antennas"] = 30  # 29 * 0.5 > 8: no feasible packing
        bad = tmp_path / "infeasible.json"
        bad.write_text(json.dumps(config))
        code = main(["solve", "--config", str(bad), "--out", str(tmp_path / "o.json")])
        assert code == EXIT_CONFIG


class TestSweepCommand:
    def test_writes_schema_csv(self, tmp_path):
        spec = small_sweep_spec(tmp_path)
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--spec", str(spec), "--out", str(out), "--jobs", "1"])
        assert code == EXIT_OK
        header = out.read_text().splitlines()[0]
        assert header == "scheme,theta0,snr_db,N,K,L,mse_mean,mse_std,num_geometries,rng_seed"
        assert len(out.read_text().splitlines()) == 1 + 2 * 2  # grid points x schemes

    def test_repeat_runs_byte_identical(self, tmp_path):
        spec = small_sweep_spec(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", "--spec", str(spec), "--out", str(a), "--jobs", "1"]) == EXIT_OK
        assert main(["sweep", "--spec", str(spec), "--out", str(b), "--jobs", "2"]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_geometry_override(self, tmp_path):
        spec = small_sweep_spec(tmp_path)
        out = tmp_path / "g1.csv"
        code = main(["sweep", "--spec", str(spec), "--out", str(out),
                     "--geometries", "1", "--jobs", "1"])
        assert code == EXIT_OK
        assert ",1,5" in out.read_text().splitlines()[1]  # num_geometries=1, seed=5


class TestUsageAndValidate:
    def test_validate_passes_and_reports(self, capsys):
        assert main(["validate", "--seed", "7"]) == EXIT_OK
        err = capsys.readouterr().err
        assert err.count("[PASS]") == 6
        assert "[FAIL]" not in err

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == EXIT_USAGE

    def test_missing_required_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["solve", "--out", "x.json"])
        assert err.value.code == EXIT_USAGE

    def test_module_entry_point(self, tmp_path):
        out = tmp_path / "solution.json"
        proc = subprocess.run(
            [sys.executable, "-m", "aircomp_fa.cli", "solve",
             "--config", str(REPO_CONFIGS / "single_user.json"), "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == EXIT_OK, proc.stderr
        assert out.exists()
        assert proc.stdout == ""  # results go to files, diagnostics to stderr
