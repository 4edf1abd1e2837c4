"""
Multi-seed suites: independent runs in parallel, one output directory each.
"""

import logging
import os
import statistics
from typing import Any, Dict, List, Optional, Sequence

from joblib import Parallel, delayed

from src.harness.config import DEFAULT_SEEDS, experiment_preset, output_root
from src.harness.reports import summarize_run
from src.harness.training import run_training

logger = logging.getLogger(__name__)


def _train_one(preset: str, seed: int, run_dir: str, overrides: Dict[str, Any]) -> str:
    config = experiment_preset(preset, **{**overrides, "seed": seed, "output_dir": run_dir})
    return run_training(config).run_dir


def run_suite(
    presets: Sequence[str],
    seeds: Sequence[int] = DEFAULT_SEEDS,
    overrides: Optional[Dict[str, Any]] = None,
    n_jobs: int = 1,
    suite_dir: Optional[str] = None,
) -> List[str]:
    """
    Train every (preset, seed) pair.

    Args:
        presets: Experiment preset names
        seeds: Seeds per preset
        overrides: Field overrides applied to every preset
        n_jobs: Parallel worker processes (joblib)
        suite_dir: Parent directory of the run directories

    Returns:
        Run directories in (preset, seed) order
    """
    suite_dir = suite_dir or os.path.join(output_root(), "suite")
    overrides = dict(overrides or {})
    jobs = [(p, s, os.path.join(suite_dir, f"{p}_seed{s}")) for p in presets for s in seeds]
    for preset in presets:
        experiment_preset(preset)
    logger.info("Suite: %d runs with %d workers into %s", len(jobs), n_jobs, suite_dir)
    return Parallel(n_jobs=n_jobs)(delayed(_train_one)(p, s, d, overrides) for p, s, d in jobs)


def summarize_suite(run_dirs: Sequence[str], reference: str = "csr2_drg", upper: str = "full_obs") -> Dict[str, Any]:
    """
    Median final success per preset plus per-seed orderings against the reference preset.

    Returns:
        Dict with per-preset medians, per-preset rows and the seeds where
        another preset beat the reference
    """
    rows = [summarize_run(run_dir) for run_dir in run_dirs]
    by_preset: Dict[str, List[Dict[str, Any]]] = {}
    for row in rows:
        by_preset.setdefault(row["preset"], []).append(row)

    medians = {
        preset: statistics.median(r["final_success_rate"] for r in preset_rows)
        for preset, preset_rows in by_preset.items()
    }
    inversions = []
    reference_rows = {r["seed"]: r for r in by_preset.get(reference, [])}
    for preset, preset_rows in by_preset.items():
        if preset in (reference, upper):
            continue
        for row in preset_rows:
            ref = reference_rows.get(row["seed"])
            if ref is not None and row["final_success_rate"] > ref["final_success_rate"]:
                inversions.append({"seed": row["seed"], "preset": preset, "reference": reference})

    recovered = {}
    for preset, preset_rows in by_preset.items():
        recovered[preset] = sum(
            1 for r in preset_rows if r["steps"] and all(step["recovered"] for step in r["steps"])
        )
    return {
        "median_success": medians,
        "runs": by_preset,
        "inversions": inversions,
        "seeds_recovering_every_step": recovered,
    }
