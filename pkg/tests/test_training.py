import json
import os

import pytest

from src.curriculum.plan import CurriculumEvent, read_events
from src.envs.config import get_env_config
from src.harness.checkpoint import CHECKPOINT_VERSION, load_checkpoint
from src.harness.reports import compare_runs, read_metrics, report_importance, reward_dip_recovery, run_eval
from src.harness.training import run_training
from src.harness.trials import TrialSet, generate_trial_set


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


def test_full_obs_run_writes_artifacts(tiny_experiment):
    report = run_training(tiny_experiment("full_obs"))
    rows = read_metrics(report.run_dir)
    assert len(rows) == 3
    assert [r["epoch"] for r in rows] == [0, 1, 2]
    assert all(r["active_feature_count"] == 27 for r in rows)
    assert all(r["wall_ms"] == 0 for r in rows)
    assert read_events(report.events_path) == []
    assert rows[-1]["eval_success_rate"] == report.final_success_rate
    for path in (report.checkpoint_path, report.config_path, report.trial_set_path, report.importance_path):
        assert os.path.exists(path)
    with open(report.config_path) as f:
        assert json.load(f)["seed"] == 1


def test_aac_masks_every_tactile_feature_at_epoch_zero(tiny_experiment):
    report = run_training(tiny_experiment("aac"))
    events = read_events(report.events_path)
    assert len(events) == 1
    assert events[0].epoch == 0
    assert len(events[0].reduced_indices) == 13
    assert all(r["active_feature_count"] == 14 for r in read_metrics(report.run_dir))


def test_forced_trigger_fires_both_csr2_steps(tiny_experiment):
    config = tiny_experiment(
        "csr2_drg", epochs=6, curriculum={"trigger_threshold": -1e9, "cooldown_epochs": 2}
    )
    report = run_training(config)
    events = read_events(report.events_path)
    assert [e.epoch for e in events] == [1, 3]
    assert [len(e.reduced_indices) for e in events] == [7, 6]
    counts = [r["active_feature_count"] for r in read_metrics(report.run_dir)]
    assert counts == [27, 20, 20, 14, 14, 14]
    trace = [counts[0]] + [c for prev, c in zip(counts, counts[1:]) if c != prev]
    assert trace == [27, 20, 14]


def test_identical_configs_give_identical_artifacts(tiny_experiment):
    first = run_training(tiny_experiment("csr2_drg", name="a", curriculum={"trigger_threshold": -1e9, "cooldown_epochs": 1}))
    second = run_training(tiny_experiment("csr2_drg", name="b", curriculum={"trigger_threshold": -1e9, "cooldown_epochs": 1}))
    assert read_bytes(first.metrics_path) == read_bytes(second.metrics_path)
    assert read_bytes(first.events_path) == read_bytes(second.events_path)
    assert load_checkpoint(first.checkpoint_path).ac.checksum() == load_checkpoint(second.checkpoint_path).ac.checksum()


def test_identity_drg_matches_drg_free_run(tiny_experiment):
    plain = run_training(tiny_experiment("full_obs", name="plain", epochs=4))
    identity = run_training(
        tiny_experiment("full_obs", name="identity", epochs=4, use_drg=True, drg={"alpha": 1.0, "active_from_start": True})
    )
    assert read_bytes(plain.metrics_path) == read_bytes(identity.metrics_path)


def test_eval_round_trip_from_checkpoint(tiny_experiment):
    report = run_training(tiny_experiment("csr2_drg", curriculum={"trigger_threshold": -1e9, "cooldown_epochs": 1}))
    trial_set = TrialSet.load(report.trial_set_path)
    assert trial_set.content_hash() == report.trial_set_hash
    first = run_eval(report.checkpoint_path, trial_set)
    second = run_eval(report.checkpoint_path, trial_set)
    assert first.success_rate == report.final_success_rate
    assert first.to_dict() == second.to_dict()


def test_eval_rejects_other_layout(tiny_experiment):
    report = run_training(tiny_experiment("full_obs"))
    small = generate_trial_set(3, env_config=get_env_config("palm_spin_small"))
    with pytest.raises(ValueError):
        run_eval(report.checkpoint_path, small)


def test_checkpoint_version_mismatch(tiny_experiment, tmp_path):
    report = run_training(tiny_experiment("full_obs"))
    with open(report.checkpoint_path) as f:
        payload = json.load(f)
    assert payload["version"] == CHECKPOINT_VERSION
    payload["version"] = CHECKPOINT_VERSION + 1
    path = tmp_path / "old.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ValueError):
        load_checkpoint(str(path))


def test_compare_run_with_itself_has_zero_deltas(tiny_experiment):
    report = run_training(tiny_experiment("full_obs"))
    table = compare_runs([report.run_dir, report.run_dir])
    assert len(table["runs"]) == 2
    for row in table["runs"]:
        assert row["delta_success_rate"] == 0.0


def test_compare_rejects_different_layouts(tiny_experiment):
    a = run_training(tiny_experiment("full_obs", name="a"))
    b = run_training(tiny_experiment("full_obs", name="b", env="palm_spin_small"))
    with pytest.raises(ValueError):
        compare_runs([a.run_dir, b.run_dir])


def test_report_importance(tiny_experiment):
    report = run_training(tiny_experiment("aac"))
    result = report_importance(report.run_dir)
    assert len(result["importance"]) == 13
    assert len(result["events"]) == 1


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_planted_importance_recovered_in_order(tiny_experiment, seed):
    config = tiny_experiment(
        "csr2_drg",
        seed=seed,
        env="planted_importance",
        epochs=1 + 7 * 3 + 1,
        hyper={"n_envs": 16, "horizon": 32, "minibatch_size": 512, "update_epochs": 1},
        curriculum={"step_counts": [1] * 8, "trigger_threshold": -1e9, "cooldown_epochs": 3},
    )
    report = run_training(config)
    order = [e.reduced_indices[0] for e in read_events(report.events_path)]
    tactile = get_env_config("planted_importance").schema().reducible_indices()
    assert order == list(reversed(tactile))


def test_reward_dip_recovery_on_synthetic_trace():
    ema = [100.0] * 5 + [60.0, 80.0, 97.0, 101.0]
    rows = [{"epoch": i, "mean_episode_reward": v} for i, v in enumerate(ema)]
    event = CurriculumEvent(4, 0, (1,), ("f",), {}, 100.0)
    result = reward_dip_recovery(rows, [event], window=10)[0]
    assert result["dip"] == pytest.approx(40.0)
    assert result["recovered"]
    assert result["recovery_epochs"] == 3
