import json
import math

import pytest

from polarmax import run
from polarmax.config import Config

FAST = ("--restarts", "1", "--iterations", "5")


def _csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    k = sum(1 for line in lines if line.startswith("#"))
    return lines[:k], lines[k].split(","), [row.split(",") for row in lines[k + 1:]]


def test_thresholds_csv(cli, tmp_path):
    out = tmp_path / "thresholds.csv"
    code, body, _ = cli("thresholds", "--s", "1", "--n-range", "3:10", "--out", out)
    assert code == 0
    assert body["success"] is True
    assert body["data"]["N0"] == 3
    comments, header, rows = _csv(out)
    assert comments[0] == f"# polarmax {Config.VERSION} config_hash={body['data']['config_hash']}"
    echoed = json.loads(comments[1].removeprefix("# config "))
    assert echoed["subcommand"] == "thresholds"
    assert echoed["n_range"] == "3:10"
    assert echoed["s"] == 1.0
    assert header == ["N", "r_bar", "R_inv", "R"]
    assert [int(r[0]) for r in rows] == list(range(3, 11))


def test_thresholds_reject_bad_input(cli):
    assert cli("thresholds", "--s", "0")[0] == 1
    assert cli("thresholds", "--n-range", "1:5")[0] == 1


def test_invalid_kernel_is_a_validation_error(cli):
    code, body, err = cli("solve", "--kernel", "bogus:1", "--n", "3")
    assert code == 1
    assert body is None
    assert err.strip().splitlines()[-1].startswith("polarmax: error:")


def test_missing_n(cli):
    code, _, err = cli("solve", "--kernel", "riesz:2")
    assert code == 1
    assert "--n" in err


def test_unknown_command(cli):
    assert cli("integrate")[0] == 1


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == 0
    assert "solve" in capsys.readouterr().out


def test_solve_artifact_envelope(cli):
    code, body, _ = cli("solve", "--n", "4", *FAST)
    assert code == 0
    assert body["message"] == "solved"
    doc = body["data"]
    assert doc["tool"] == "polarmax"
    assert doc["version"] == Config.VERSION
    assert doc["config"]["subcommand"] == "solve"
    assert len(doc["result"]["configuration"]) == 4
    assert len(doc["result"]["angular_gaps"]) == 4
    assert math.isclose(sum(doc["result"]["angular_gaps"]), 2 * math.pi, rel_tol=1e-9)


def test_config_file_overrides_flags(cli, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 3, "restarts": 1}))
    code, body, _ = cli("solve", "--n", "8", "--iterations", "5", "--config", cfg)
    assert code == 0
    assert body["data"]["config"]["n"] == 3
    assert len(body["data"]["result"]["configuration"]) == 3


def test_unknown_config_key(cli, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 3, "temperature": 0.5}))
    code, _, err = cli("solve", "--config", cfg)
    assert code == 1
    assert "temperature" in err


def test_solver_failure_exit_code(cli, tmp_path):
    cloud = tmp_path / "one.csv"
    cloud.write_text("0,0\n")
    code, _, err = cli("solve", "--set", f"cloud:{cloud}", "--n", "1", "--mode", "constrained", *FAST)
    assert code == 2
    assert "solver failure" in err


def test_hash_ignores_output_paths(cli, tmp_path):
    _, first, _ = cli("solve", "--n", "3", *FAST, "--out", tmp_path / "a.json")
    _, second, _ = cli("solve", "--n", "3", *FAST, "--out", tmp_path / "b.json",
                       "--profile-out", tmp_path / "profile.csv")
    assert first["data"]["config_hash"] == second["data"]["config_hash"]
    doc = json.loads((tmp_path / "a.json").read_text())
    assert doc["config_hash"] == first["data"]["config_hash"]
    _, header, rows = _csv(tmp_path / "profile.csv")
    assert header == ["y0", "y1", "potential"]
    assert rows


def test_census_reads_a_solve_artifact(cli, tmp_path):
    artifact = tmp_path / "solve.json"
    assert cli("solve", "--n", "4", *FAST, "--out", artifact)[0] == 0
    code, body, _ = cli("verify", "census", "--from", artifact, "--eps", "0.05")
    assert code == 0
    result = body["data"]["result"]
    assert result["N"] == 4
    assert result["set"] == "circle"
    assert 0 <= result["count"] <= 4


def test_census_rejects_foreign_json(cli, tmp_path):
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"result": {"value": 1}}))
    assert cli("verify", "census", "--from", other)[0] == 1


def test_replacement_from_cloud(cli, tmp_path):
    cloud = tmp_path / "cloud.csv"
    cloud.write_text("# unit square\n0,0\n1,0\n0,1\n1,1\n0.5,0.5\n")
    code, body, _ = cli("verify", "replacement", "--cloud", cloud, "--x", "2,0.5")
    assert code == 0
    assert body["message"] == "dominance holds"
    assert body["data"]["result"]["dominance_violations"] == 0
    assert body["data"]["result"]["n"] >= 1


def test_replacement_needs_a_sample(cli):
    assert cli("verify", "replacement", "--x", "2,0")[0] == 1


def test_perturbation_csv(cli, tmp_path):
    out = tmp_path / "gain.csv"
    code, body, _ = cli("verify", "perturbation", "--p", "2", "--c2", "0.05,0.1", "--resolution", "512", "--out", out)
    assert code == 0
    assert "positive_interval" in body["data"]
    _, header, rows = _csv(out)
    assert header == ["c2", "gain"]
    assert [float(r[0]) for r in rows] == [0.05, 0.1]


def test_chebyshev_with_measure(cli, tmp_path):
    out = tmp_path / "measure.csv"
    code, body, _ = cli("chebyshev", "--res", "60", "--iterations", "2000", "--measure-out", out)
    assert code == 0
    assert body["message"] in ("converged", "iteration budget exhausted above gap tolerance")
    result = body["data"]["result"]
    assert result["upper"] >= result["value"] - 1e-12
    _, header, rows = _csv(out)
    assert header == ["x0", "x1", "weight"]
    assert sum(float(r[2]) for r in rows) == pytest.approx(1.0)


def test_cover_reports_the_closed_form(cli):
    code, body, _ = cli("cover", "--n", "4", *FAST)
    assert code == 0
    result = body["data"]["result"]
    assert result["closed_form_eta"] == pytest.approx(math.sin(math.pi / 4))
    assert result["eta"] == pytest.approx(math.sin(math.pi / 4), abs=5e-3)


def test_asymptotics_json(cli):
    code, body, _ = cli("asymptotics", "--ns", "8,16", *FAST)
    assert code == 0
    result = body["data"]["result"]
    assert result["Ns"] == [8, 16]
    assert result["reference"] == pytest.approx(0.25)
    assert all(r >= 0.25 - 1e-9 for r in result["ratios"])


def test_asymptotics_rejects_a_decreasing_grid(cli):
    assert cli("asymptotics", "--ns", "16,8")[0] == 1


def test_outputs_do_not_depend_on_the_thread_count(cli, tmp_path, monkeypatch):
    outputs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("POLARMAX_THREADS", threads)
        out = tmp_path / f"cube_{threads}.json"
        code, _, _ = cli("solve", "--kernel", "riesz:1", "--set", "cube:2", "--n", "5", "--restarts", "3",
                         "--iterations", "5", "--seed", "9", "--out", out)
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
