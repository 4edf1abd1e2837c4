"""
Offline analysis of finished runs: checkpoint evaluation, curriculum
reward dips and run comparison tables.
"""

import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.curriculum.plan import CurriculumEvent, read_events
from src.envs.config import EnvConfig, get_env_config
from src.envs.scripted import ScriptedController, ZeroPolicy
from src.harness.checkpoint import load_checkpoint
from src.harness.training import METRICS_FILE, REPORT_FILE, RunReport
from src.harness.trials import TrialSet
from src.rl.evaluate import DeterministicActor, EvalReport, Policy, evaluate_policy
from src.utils.file_io import read_csv_rows, read_json

logger = logging.getLogger(__name__)

SCRIPTED_PREFIX = "scripted:"
ZERO_PREFIX = "zero:"

DEFAULT_RECOVERY_WINDOW = 300
DEFAULT_RECOVERY_FRACTION = 0.95


@dataclass
class LoadedPolicy:
    policy: Policy
    env_config: EnvConfig
    obs_dim: int
    source: str
    mask: Tuple[int, ...] = ()


def load_policy(source: str) -> LoadedPolicy:
    """
    Resolve a checkpoint path or a pseudo-checkpoint.

    "scripted:<env preset>" gives the scripted controller and "zero:<env preset>"
    the resting policy on that environment; anything else is read as a
    checkpoint file.
    """
    if source.startswith(SCRIPTED_PREFIX) or source.startswith(ZERO_PREFIX):
        prefix, env_name = source.split(":", 1)
        env_config = get_env_config(env_name)
        policy = ScriptedController(env_config) if prefix + ":" == SCRIPTED_PREFIX else ZeroPolicy(env_config.n_fingers)
        return LoadedPolicy(policy, env_config, env_config.schema().total_length, source)
    checkpoint = load_checkpoint(source)
    actor = DeterministicActor(checkpoint.ac, checkpoint.drg_state, checkpoint.drg_config)
    return LoadedPolicy(actor, checkpoint.env_config, checkpoint.ac.obs_dim, source, checkpoint.drg_state.mask)


def run_eval(source: str, trial_set: TrialSet) -> EvalReport:
    """
    Evaluate a checkpoint (or pseudo-checkpoint) on a trial set.

    Raises:
        ValueError: If the trial set was made for another observation layout
    """
    loaded = load_policy(source)
    if trial_set.feature_count is not None and trial_set.feature_count != loaded.obs_dim:
        raise ValueError(
            f"Trial set expects {trial_set.feature_count} features but {source} uses {loaded.obs_dim}"
        )
    if trial_set.env_name is not None and trial_set.env_name != loaded.env_config.name:
        logger.warning("Trial set was made for '%s', evaluating on '%s'", trial_set.env_name, loaded.env_config.name)
    return evaluate_policy(loaded.policy, loaded.env_config, trial_set)


def read_metrics(run_dir: str) -> List[Dict[str, Any]]:
    """Metrics rows with numeric columns parsed; empty cells become None."""
    rows = []
    for row in read_csv_rows(os.path.join(run_dir, METRICS_FILE)):
        parsed: Dict[str, Any] = {}
        for key, value in row.items():
            if value == "":
                parsed[key] = None
            elif key in ("epoch", "active_feature_count", "curriculum_step", "wall_ms"):
                parsed[key] = int(value)
            else:
                parsed[key] = float(value)
        rows.append(parsed)
    return rows


def load_run(run_dir: str) -> RunReport:
    return RunReport.from_dict(read_json(os.path.join(run_dir, REPORT_FILE)))


def epochs_to_threshold(rows: Sequence[Dict[str, Any]], threshold: float) -> Optional[int]:
    """First epoch whose reward EMA exceeds the threshold."""
    for row in rows:
        ema = row["mean_episode_reward"]
        if ema is not None and ema > threshold:
            return row["epoch"]
    return None


def reward_dip_recovery(
    rows: Sequence[Dict[str, Any]],
    events: Sequence[CurriculumEvent],
    window: int = DEFAULT_RECOVERY_WINDOW,
    fraction: float = DEFAULT_RECOVERY_FRACTION,
) -> List[Dict[str, Any]]:
    """
    Reward dip after each curriculum step and the epochs needed to recover.

    The pre-step level is the EMA at the step's epoch. Recovery is the first
    later epoch (within the window) whose EMA is back within (1 - fraction)
    of the pre-step level's magnitude.

    Returns:
        One dict per event: step_index, epoch, pre_ema, dip_ema, dip, recovered, recovery_epochs
    """
    by_epoch = {row["epoch"]: row["mean_episode_reward"] for row in rows}
    results = []
    for event in events:
        pre = by_epoch.get(event.epoch)
        after = [
            (epoch, ema)
            for epoch, ema in sorted(by_epoch.items())
            if event.epoch < epoch <= event.epoch + window and ema is not None
        ]
        if pre is None or not after:
            results.append(
                {"step_index": event.step_index, "epoch": event.epoch, "pre_ema": pre, "dip_ema": None,
                 "dip": None, "recovered": False, "recovery_epochs": None}
            )
            continue
        target = pre - (1.0 - fraction) * abs(pre)
        dip_epoch, dip_ema = min(after, key=lambda item: item[1])
        recovery = next((epoch for epoch, ema in after if epoch >= dip_epoch and ema >= target), None)
        results.append(
            {
                "step_index": event.step_index,
                "epoch": event.epoch,
                "pre_ema": pre,
                "dip_ema": dip_ema,
                "dip": pre - dip_ema,
                "recovered": recovery is not None,
                "recovery_epochs": None if recovery is None else recovery - event.epoch,
            }
        )
    return results


def summarize_run(run_dir: str) -> Dict[str, Any]:
    """One comparison row for a run directory."""
    report = load_run(run_dir)
    config = read_json(report.config_path)
    rows = read_metrics(run_dir)
    events = read_events(report.events_path)
    threshold = config["curriculum"]["trigger_threshold"]
    return {
        "run": run_dir,
        "preset": report.preset,
        "seed": report.seed,
        "feature_count": report.feature_count,
        "final_success_rate": report.final_success_rate,
        "marathon_mean": report.marathon_mean,
        "epochs_to_threshold": epochs_to_threshold(rows, threshold),
        "n_events": len(events),
        "steps": reward_dip_recovery(rows, events),
    }


def compare_runs(run_dirs: Sequence[str]) -> Dict[str, Any]:
    """
    Align the headline numbers of several runs against the first one.

    Raises:
        ValueError: If no runs are given or the runs use different observation layouts
    """
    if not run_dirs:
        raise ValueError("Nothing to compare")
    rows = [summarize_run(run_dir) for run_dir in run_dirs]
    widths = {row["feature_count"] for row in rows}
    if len(widths) > 1:
        raise ValueError(f"Runs have incompatible schemas (feature counts {sorted(widths)})")

    base = rows[0]
    for row in rows:
        row["delta_success_rate"] = row["final_success_rate"] - base["final_success_rate"]
        row["delta_marathon_mean"] = _delta(row["marathon_mean"], base["marathon_mean"])
        row["delta_epochs_to_threshold"] = _delta(row["epochs_to_threshold"], base["epochs_to_threshold"])
    return {"baseline": base["run"], "runs": rows}


def _delta(value, reference):
    if value is None or reference is None:
        return None
    return value - reference


def report_importance(run_dir: str) -> Dict[str, Any]:
    """Importance snapshot and curriculum events of a run."""
    report = load_run(run_dir)
    return {
        "importance": read_csv_rows(report.importance_path),
        "events": [event.to_dict() for event in read_events(report.events_path)],
    }
