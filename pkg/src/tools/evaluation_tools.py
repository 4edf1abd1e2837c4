"""
Tools that evaluate a checkpoint: trial-set success, marathon and rate sweep.
"""

from typing import Any, Dict, Optional, Sequence

from src.envs.config import get_env_config
from src.harness.protocols import consecutive_success, rate_sweep, servo_rate_sweep
from src.harness.reports import load_policy, run_eval
from src.harness.trials import DEFAULT_TRIAL_COUNT, TrialSet, generate_trial_set
from src.tools.base import BaseTool


def _seeds(trial_set: Optional[str], n_seeds: int) -> Sequence[int]:
    if trial_set:
        trials = TrialSet.load(trial_set).trials
    else:
        trials = generate_trial_set(n_seeds).trials
    return [trial.seed for trial in trials[:n_seeds]]


class EvalTool(BaseTool):
    def get_name(self) -> str:
        return "eval"

    def execute(self, checkpoint: str, trial_set: str) -> Dict[str, Any]:
        """
        Args:
            checkpoint: Checkpoint path, or scripted:<env> / zero:<env>
            trial_set: Trial set JSON path
        """
        return self._run(lambda: run_eval(checkpoint, TrialSet.load(trial_set)).to_dict())


class MarathonTool(BaseTool):
    def get_name(self) -> str:
        return "marathon"

    def execute(
        self, checkpoint: str, duration: float = 30.0, n_seeds: int = 10, trial_set: Optional[str] = None
    ) -> Dict[str, Any]:
        """
        Args:
            checkpoint: Checkpoint path, or scripted:<env> / zero:<env>
            duration: Simulated seconds per marathon
            n_seeds: Number of marathons (seeds taken from the trial set)
            trial_set: Optional trial set JSON supplying the seeds
        """

        def action():
            loaded = load_policy(checkpoint)
            return consecutive_success(loaded.policy, loaded.env_config, _seeds(trial_set, n_seeds), duration).to_dict()

        return self._run(action)


class RateSweepTool(BaseTool):
    def get_name(self) -> str:
        return "rate-sweep"

    def execute(
        self,
        checkpoint: Optional[str],
        rates: Sequence[float],
        n_seeds: int = 5,
        duration: float = 10.0,
        servo_env: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Args:
            checkpoint: Checkpoint path, or scripted:<env> / zero:<env>; None with servo_env runs the servo oracle only
            rates: Command rates (Hz)
            n_seeds: Episodes per rate
            duration: Simulated seconds per episode
            servo_env: Environment preset whose servo is swept against a sinusoid
        """

        def action():
            result: Dict[str, Any] = {}
            if servo_env is not None:
                env_config = get_env_config(servo_env)
                result["servo_oracle"] = servo_rate_sweep(env_config.servo, rates, sim_rate=env_config.sim_rate)
            if checkpoint is not None:
                loaded = load_policy(checkpoint)
                result["policy"] = rate_sweep(
                    loaded.policy, loaded.env_config, rates, _seeds(None, n_seeds), duration
                )
            if not result:
                raise ValueError("rate-sweep needs a checkpoint or --servo-env")
            return result

        return self._run(action)


class MakeTrialsTool(BaseTool):
    def get_name(self) -> str:
        return "make-trials"

    def execute(self, output: str, size: int = DEFAULT_TRIAL_COUNT, seed: int = 0, env: Optional[str] = None) -> Dict[str, Any]:
        """
        Args:
            output: Path of the trial set JSON to write
            size: Number of trials
            seed: Trial set seed
            env: Environment preset the trials are meant for
        """

        def action():
            env_config = get_env_config(env) if env else None
            trial_set = generate_trial_set(size, seed, env_config)
            trial_set.save(output)
            return {"path": output, "size": trial_set.size, "content_hash": trial_set.content_hash()}

        return self._run(action)
