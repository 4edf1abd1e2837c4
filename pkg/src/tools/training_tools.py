"""
Tools that launch training: single runs and multi-seed suites.
"""

import os
from typing import Any, Dict, Optional, Sequence

from src.harness.config import DEFAULT_SEEDS, ExperimentConfig, experiment_preset
from src.harness.suite import run_suite, summarize_suite
from src.harness.training import run_training
from src.tools.base import BaseTool
from src.utils.file_io import read_json


class TrainTool(BaseTool):
    """Train one experiment from a config file or a preset name."""

    def get_name(self) -> str:
        return "train"

    def execute(self, config: str, seed: Optional[int] = None, output_dir: Optional[str] = None) -> Dict[str, Any]:
        """
        Args:
            config: Path to an ExperimentConfig JSON file, or an experiment preset name
            seed: Overrides the config's seed
            output_dir: Overrides the run directory
        """

        def action():
            if os.path.isfile(config):
                experiment = ExperimentConfig.from_json_file(config)
            else:
                experiment = experiment_preset(config)
            updates = {}
            if seed is not None:
                updates["seed"] = seed
            if output_dir is not None:
                updates["output_dir"] = output_dir
            if updates:
                experiment = ExperimentConfig.model_validate({**experiment.model_dump(), **updates})
            return run_training(experiment).to_dict()

        return self._run(action)


class SuiteTool(BaseTool):
    """Train several presets over several seeds and summarize them."""

    def get_name(self) -> str:
        return "suite"

    def execute(
        self,
        presets: Sequence[str],
        seeds: Sequence[int] = DEFAULT_SEEDS,
        n_jobs: int = 1,
        overrides: Optional[str] = None,
        suite_dir: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Args:
            presets: Experiment preset names
            seeds: Seeds per preset
            n_jobs: Parallel workers
            overrides: Optional JSON file of field overrides applied to every preset
            suite_dir: Parent directory for the runs
        """

        def action():
            fields = read_json(overrides) if overrides else {}
            run_dirs = run_suite(presets, seeds, fields, n_jobs=n_jobs, suite_dir=suite_dir)
            return {"run_dirs": run_dirs, "summary": summarize_suite(run_dirs)}

        return self._run(action)
