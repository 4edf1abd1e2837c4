"""
Evaluation protocols beyond the trial-set success rate: the consecutive
success marathon, control-rate sweeps and the masked-input dependency
diagnostic.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.envs.config import EnvConfig, ServoSpec
from src.envs.palm_spin import TrackingRecorder, env_reset, env_step
from src.envs.servo import hold_steps_for_rate, servo_tracking_rmse
from src.nn.mlp import mlp_backward, mlp_forward
from src.rl.actor_critic import ActorCritic
from src.rl.evaluate import Policy, reset_policy

logger = logging.getLogger(__name__)


@dataclass
class MarathonReport:
    duration_s: float
    seeds: List[int]
    counts: List[int]

    @property
    def mean(self) -> float:
        return float(np.mean(self.counts)) if self.counts else 0.0

    def to_dict(self) -> Dict[str, object]:
        return {**asdict(self), "mean": self.mean}


def consecutive_success(
    policy: Policy, env_config: EnvConfig, seeds: Sequence[int], duration_s: float = 30.0
) -> MarathonReport:
    """
    Count goals reached in a fixed simulated duration with goal resampling.

    Success uses the evaluation tolerance; a new goal is drawn as soon as the
    current one is reached.

    Args:
        policy: Deterministic policy
        env_config: Environment configuration
        seeds: One marathon per seed
        duration_s: Simulated seconds per marathon

    Returns:
        MarathonReport with per-seed counts
    """
    config = env_config.model_copy(update={"resample_on_success": True, "episode_length": float(duration_s)})
    counts = []
    for seed in seeds:
        reset_policy(policy, seed)
        state, obs = env_reset(config, seed, evaluation=True)
        while not state.done:
            obs = env_step(state, policy.act(obs)).observation
        counts.append(state.goals_reached)
    report = MarathonReport(duration_s=float(duration_s), seeds=[int(s) for s in seeds], counts=counts)
    logger.info("Marathon over %d seeds: mean %.2f goals in %.0f s", len(counts), report.mean, duration_s)
    return report


def rate_sweep(
    policy: Policy,
    env_config: EnvConfig,
    rates: Sequence[float],
    seeds: Sequence[int],
    duration_s: float = 10.0,
) -> List[Dict[str, object]]:
    """
    Run the policy at several command rates and measure how well the servos follow.

    At each rate the command is held for sim_rate / rate substeps. After
    every substep the servo positions are compared with the command the
    policy actually issued, so the error is the servo lag behind the held
    command.

    Args:
        policy: Deterministic policy
        env_config: Environment configuration
        rates: Command frequencies (Hz); each must divide the simulation rate
        seeds: Episodes per rate
        duration_s: Simulated seconds per episode

    Returns:
        One row per rate: rate_hz, hold_steps, per-joint RMSE, mean RMSE, mean goals
    """
    rows = []
    for rate in rates:
        hold = hold_steps_for_rate(env_config.sim_rate, rate)
        config = env_config.model_copy(
            update={"control_every": hold, "resample_on_success": True, "episode_length": float(duration_s)}
        )

        sq_err = np.zeros(config.n_fingers)
        count = 0
        goals = []
        for seed in seeds:
            reset_policy(policy, seed)
            state, obs = env_reset(config, seed, evaluation=True)
            tracker = TrackingRecorder(config.n_fingers)
            while not state.done:
                obs = env_step(state, policy.act(obs), tracker).observation
            sq_err += tracker.sq_err
            count += tracker.count
            goals.append(state.goals_reached)
        per_joint = np.sqrt(sq_err / max(count, 1))
        rows.append(
            {
                "rate_hz": float(rate),
                "hold_steps": hold,
                "joint_rmse": [float(v) for v in per_joint],
                "mean_rmse": float(np.mean(per_joint)),
                "mean_goals": float(np.mean(goals)) if goals else 0.0,
            }
        )
        logger.info("Rate %.1f Hz: tracking RMSE %.4f", rate, rows[-1]["mean_rmse"])
    return rows


def servo_rate_sweep(
    servo: ServoSpec,
    rates: Sequence[float],
    sim_rate: float = 60.0,
    duration_s: float = 8.0,
    frequency_hz: float = 0.5,
    amplitude: float = 1.0,
) -> List[Dict[str, object]]:
    """Tracking RMSE of a single servo following a sinusoid held at each rate."""

    def reference(t: float) -> float:
        return amplitude * math.sin(2.0 * math.pi * frequency_hz * t)

    rows = []
    for rate in rates:
        result = servo_tracking_rmse(servo, reference, sim_rate, rate, duration_s)
        rows.append({"rate_hz": float(rate), "hold_steps": result["hold_steps"], "mean_rmse": result["rmse"]})
    return rows


def collect_observations(
    policy: Policy, env_config: EnvConfig, seeds: Sequence[int], max_steps: Optional[int] = None
) -> np.ndarray:
    """Raw observations visited by the policy over one episode per seed."""
    observations = []
    for seed in seeds:
        reset_policy(policy, seed)
        state, obs = env_reset(env_config, seed, evaluation=True)
        while not state.done:
            observations.append(obs)
            obs = env_step(state, policy.act(obs)).observation
            if max_steps is not None and state.elapsed_steps >= max_steps:
                break
    return np.asarray(observations)


def input_sensitivity(ac: ActorCritic, inputs: np.ndarray) -> np.ndarray:
    """
    Mean absolute Jacobian of the actor's mean action with respect to each input slot.

    Args:
        ac: Actor-critic
        inputs: Actor inputs, shape (B, n)

    Returns:
        Array of shape (n,): mean over samples of the Euclidean norm of d(mean)/d(x_j)
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    out, cache = mlp_forward(ac.actor.mean_net, inputs)
    squared = np.zeros_like(inputs)
    for k in range(out.shape[1]):
        grad_out = np.zeros_like(out)
        grad_out[:, k] = 1.0
        jac_row = mlp_backward(cache, grad_out).input_grad
        squared += jac_row * jac_row
    return np.mean(np.sqrt(squared), axis=0)


def dependency_ratio(ac: ActorCritic, inputs: np.ndarray, mask: Sequence[int]) -> float:
    """
    Mean sensitivity of the actor to masked slots over its mean sensitivity to retained slots.

    A ratio near 0 means the actor ignores whatever arrives in the masked
    slots; near 1 means it reacts to them as much as to real features.

    Raises:
        ValueError: If the mask is empty or covers every slot
    """
    sensitivity = input_sensitivity(ac, inputs)
    masked = sorted(set(int(i) for i in mask))
    retained = [j for j in range(sensitivity.size) if j not in set(masked)]
    if not masked or not retained:
        raise ValueError("Dependency ratio needs both masked and retained slots")
    return float(np.mean(sensitivity[masked]) / max(np.mean(sensitivity[retained]), 1e-12))
