"""
Deterministic evaluation on a frozen trial set.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Protocol

import numpy as np

from src.drg.generator import DrgConfig, DrgState, apply_drg, eval_view
from src.envs.config import EnvConfig
from src.envs.palm_spin import env_reset, env_step
from src.harness.trials import TrialSet
from src.rl.actor_critic import ActorCritic
from src.utils.seeding import STREAM_EVAL, make_rng

logger = logging.getLogger(__name__)


class Policy(Protocol):
    def act(self, obs: np.ndarray) -> np.ndarray: ...


class DeterministicActor:
    """
    Mean action of a trained actor behind the evaluation view of its DRG state.

    Masked slots still receive replacement samples at evaluation; they are
    drawn from a stream seeded by the trial, so outcomes do not depend on
    trial order.
    """

    def __init__(self, ac: ActorCritic, drg_state: DrgState, drg_config: DrgConfig):
        self.ac = ac
        self.drg_config = drg_config
        self.view = eval_view(drg_state, drg_config)
        self.rng = make_rng(0, STREAM_EVAL)

    def reset(self, seed: int) -> None:
        self.rng = make_rng(seed, STREAM_EVAL)

    def act(self, obs: np.ndarray) -> np.ndarray:
        return self.ac.mean_action(apply_drg(obs, self.view, self.drg_config, self.rng))


@dataclass
class TrialOutcome:
    index: int
    seed: int
    success: bool
    steps: int
    final_error: float


@dataclass
class EvalReport:
    success_rate: float
    n_trials: int
    trial_set_hash: str
    outcomes: List[TrialOutcome] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success_rate": self.success_rate,
            "n_trials": self.n_trials,
            "trial_set_hash": self.trial_set_hash,
            "outcomes": [asdict(o) for o in self.outcomes],
        }


def reset_policy(policy: Policy, seed: int) -> None:
    reset = getattr(policy, "reset", None)
    if callable(reset):
        reset(seed)


def evaluate_policy(
    policy: Policy, env_config: EnvConfig, trial_set: TrialSet, max_steps: Optional[int] = None
) -> EvalReport:
    """
    Run one deterministic episode per trial under the evaluation tolerance.

    Goals are not resampled: an episode ends on its first success or when
    time runs out.

    Args:
        policy: Any object with act(obs) -> action
        env_config: Environment configuration
        trial_set: Frozen trials
        max_steps: Optional cap on control steps per trial

    Returns:
        EvalReport with success rate and per-trial outcomes
    """
    eval_config = env_config.model_copy(update={"resample_on_success": False})
    outcomes = []
    for k, trial in enumerate(trial_set.trials):
        reset_policy(policy, trial.seed)
        state, obs = env_reset(
            eval_config,
            trial.seed,
            evaluation=True,
            initial_angle=trial.initial_angle,
            target_angle=trial.target_angle,
        )
        success = False
        error = float("nan")
        while not state.done:
            result = env_step(state, policy.act(obs))
            obs = result.observation
            success = result.success
            error = result.info["angle_error"]
            if max_steps is not None and state.elapsed_steps >= max_steps:
                break
        outcomes.append(
            TrialOutcome(index=k, seed=trial.seed, success=bool(success), steps=state.elapsed_steps, final_error=abs(error))
        )

    n = len(outcomes)
    rate = sum(o.success for o in outcomes) / n if n else 0.0
    logger.info("Evaluation: %d/%d trials succeeded", sum(o.success for o in outcomes), n)
    return EvalReport(success_rate=rate, n_trials=n, trial_set_hash=trial_set.content_hash(), outcomes=outcomes)
