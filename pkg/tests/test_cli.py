import json

from conftest import TINY_RUN
from src.main import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_make_trials_then_eval_scripted(capsys, tmp_path):
    trials = str(tmp_path / "trials.json")
    code, out, _ = run_cli(capsys, "make-trials", trials, "--size", "5", "--env", "palm_spin_easy")
    assert code == 0
    assert json.loads(out)["size"] == 5

    code, out, _ = run_cli(capsys, "eval", "scripted:palm_spin_easy", trials)
    assert code == 0
    result = json.loads(out)
    assert result["n_trials"] == 5
    assert result["success_rate"] == 1.0


def test_unknown_preset_reports_error_json(capsys):
    code, out, err = run_cli(capsys, "train", "csr7_drg")
    assert code == 1
    assert out == ""
    error = json.loads(err.strip().splitlines()[-1])
    assert error["error_type"] == "invalid_input"
    assert "csr7_drg" in error["error"]


def test_missing_checkpoint_is_not_found(capsys, tmp_path):
    trials = str(tmp_path / "trials.json")
    run_cli(capsys, "make-trials", trials, "--size", "2")
    code, _, err = run_cli(capsys, "eval", str(tmp_path / "nope.json"), trials)
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["error_type"] == "not_found"


def test_train_from_config_file_then_inspect(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"preset": "aac", **TINY_RUN}))
    run_dir = str(tmp_path / "run")
    code, out, _ = run_cli(capsys, "train", str(config), "--seed", "2", "--output-dir", run_dir)
    assert code == 0
    report = json.loads(out)
    assert report["seed"] == 2
    assert report["n_events"] == 1

    code, out, _ = run_cli(capsys, "report-importance", run_dir)
    assert code == 0
    assert len(json.loads(out)["events"]) == 1

    code, out, _ = run_cli(capsys, "marathon", report["checkpoint_path"], "--duration", "2", "--seeds", "2")
    assert code == 0
    assert len(json.loads(out)["counts"]) == 2

    code, out, _ = run_cli(capsys, "compare", run_dir, run_dir)
    assert code == 0
    assert json.loads(out)["baseline"] == run_dir


def test_train_reads_config_file_with_any_extension(capsys, tmp_path):
    config = tmp_path / "experiment.cfg"
    config.write_text(json.dumps({"preset": "full_obs", **TINY_RUN}))
    code, out, _ = run_cli(capsys, "train", str(config), "--output-dir", str(tmp_path / "run"))
    assert code == 0
    assert json.loads(out)["n_events"] == 0


def test_servo_rate_sweep_without_checkpoint(capsys):
    code, out, _ = run_cli(capsys, "rate-sweep", "--rates", "60", "12", "2", "--servo-env", "rate_sweep_servo")
    assert code == 0
    rows = json.loads(out)["servo_oracle"]
    by_rate = {row["rate_hz"]: row["mean_rmse"] for row in rows}
    assert by_rate[12.0] < by_rate[60.0]
    assert by_rate[12.0] < by_rate[2.0]
