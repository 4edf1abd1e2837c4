"""
Rollout collection over a pool of environments.

Each environment slot owns its state, its current observation, a stream of
reset seeds, a policy-noise stream and a DRG replacement stream, all keyed
by (master seed, purpose, slot index). Slots are stepped in index order, so
a batch depends only on the master seed and never on scheduling.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.curriculum.ledger import ImportanceLedger, record_activations
from src.drg.generator import DrgConfig, DrgState, apply_drg
from src.envs.config import EnvConfig
from src.envs.palm_spin import EnvState, env_reset, env_step
from src.nn.policy import gaussian_policy_sample, policy_forward
from src.rl.actor_critic import ActorCritic
from src.utils.errors import NonFiniteError
from src.utils.seeding import (
    STREAM_DRG_SAMPLES,
    STREAM_ENV_SEEDS,
    STREAM_POLICY_NOISE,
    make_rng,
    next_seed,
)

logger = logging.getLogger(__name__)


@dataclass
class TrajectoryBatch:
    """
    Transitions of one epoch with a (T, N) leading shape.

    values carries one extra row: the bootstrap value of the observation
    after the last step.
    """

    actor_obs: np.ndarray
    critic_obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    old_logp: np.ndarray
    values: np.ndarray
    advantages: Optional[np.ndarray] = None
    returns: Optional[np.ndarray] = None

    def __post_init__(self):
        lead = self.rewards.shape
        for name in ("actor_obs", "critic_obs", "actions", "dones", "old_logp"):
            if getattr(self, name).shape[: len(lead)] != lead:
                raise ValueError(f"{name} does not share the batch shape {lead}")
        if self.values.shape != (lead[0] + 1,) + lead[1:]:
            raise ValueError(f"values shape {self.values.shape} must include a bootstrap row")
        if self.actor_obs.shape[-1] != self.critic_obs.shape[-1]:
            raise ValueError("Actor and critic observations must have the same width")

    @property
    def horizon(self) -> int:
        return self.rewards.shape[0]

    @property
    def batch_size(self) -> int:
        return int(self.rewards.size)

    def flatten(self) -> Dict[str, np.ndarray]:
        """Flatten (T, N, ...) to (T * N, ...) for minibatching."""
        if self.advantages is None or self.returns is None:
            raise ValueError("Advantages must be computed before flattening the batch")
        if not np.all(np.isfinite(self.advantages)):
            raise NonFiniteError("Advantages contain non-finite values")
        size = self.batch_size
        return {
            "actor_obs": self.actor_obs.reshape(size, -1),
            "critic_obs": self.critic_obs.reshape(size, -1),
            "actions": self.actions.reshape(size, -1),
            "old_logp": self.old_logp.reshape(size),
            "advantages": self.advantages.reshape(size),
            "returns": self.returns.reshape(size),
        }


@dataclass
class EnvSlot:
    """One environment with its private random streams."""

    index: int
    state: EnvState
    obs: np.ndarray
    seed_rng: np.random.Generator
    policy_rng: np.random.Generator
    drg_rng: np.random.Generator
    episode_return: float = 0.0

    def reset(self, config: EnvConfig) -> None:
        self.state, self.obs = env_reset(config, next_seed(self.seed_rng))
        self.episode_return = 0.0


@dataclass
class EnvPool:
    config: EnvConfig
    slots: List[EnvSlot] = field(default_factory=list)

    @classmethod
    def create(cls, config: EnvConfig, n_envs: int, master_seed: int) -> "EnvPool":
        if n_envs < 1:
            raise ValueError("An environment pool needs at least one environment")
        slots = []
        for i in range(n_envs):
            seed_rng = make_rng(master_seed, STREAM_ENV_SEEDS, i)
            state, obs = env_reset(config, next_seed(seed_rng))
            slots.append(
                EnvSlot(
                    index=i,
                    state=state,
                    obs=obs,
                    seed_rng=seed_rng,
                    policy_rng=make_rng(master_seed, STREAM_POLICY_NOISE, i),
                    drg_rng=make_rng(master_seed, STREAM_DRG_SAMPLES, i),
                )
            )
        return cls(config=config, slots=slots)

    @property
    def n_envs(self) -> int:
        return len(self.slots)

    def observations(self) -> np.ndarray:
        return np.stack([slot.obs for slot in self.slots])


@dataclass
class RolloutStats:
    episode_returns: List[float]
    successes: int
    steps: int


def collect_rollouts(
    ac: ActorCritic,
    pool: EnvPool,
    drg_state: DrgState,
    drg_config: DrgConfig,
    horizon: int,
    ledger: Optional[ImportanceLedger] = None,
) -> Tuple[TrajectoryBatch, RolloutStats]:
    """
    Step every environment for horizon control steps.

    The actor acts on apply_drg(obs); the critic is evaluated on the raw
    observation. The ledger, when given, counts activations of the true
    (pre-replacement) readings of the features it tracks.

    Args:
        ac: Actor-critic
        pool: Environment pool (advanced in place)
        drg_state: DRG state, read-only during collection
        drg_config: DRG configuration
        horizon: Steps per environment
        ledger: Optional importance ledger updated in place

    Returns:
        Tuple of (batch, stats with the returns of episodes that ended)

    Raises:
        NonFiniteError: If an environment produced a non-finite observation
    """
    T, N, n = horizon, pool.n_envs, ac.obs_dim
    A = ac.action_dim
    actor_obs = np.zeros((T, N, n))
    critic_obs = np.zeros((T, N, n))
    actions = np.zeros((T, N, A))
    rewards = np.zeros((T, N))
    dones = np.zeros((T, N))
    old_logp = np.zeros((T, N))
    values = np.zeros((T + 1, N))
    tracked = list(ledger.feature_indices) if ledger is not None else []
    episode_returns: List[float] = []
    successes = 0

    for t in range(T):
        raw = pool.observations()
        if not np.all(np.isfinite(raw)):
            raise NonFiniteError(f"Non-finite observation at rollout step {t}")
        transformed = np.stack([apply_drg(slot.obs, drg_state, drg_config, slot.drg_rng) for slot in pool.slots])
        mean, log_std, _ = policy_forward(ac.actor, transformed)
        values[t] = ac.value(raw)
        actor_obs[t] = transformed
        critic_obs[t] = raw
        if ledger is not None:
            record_activations(ledger, raw[:, tracked])

        for i, slot in enumerate(pool.slots):
            action, logp = gaussian_policy_sample(mean[i], log_std, slot.policy_rng)
            result = env_step(slot.state, action)
            actions[t, i] = action
            old_logp[t, i] = logp
            rewards[t, i] = result.reward
            dones[t, i] = float(result.done)
            successes += int(result.success)
            slot.episode_return += result.reward
            if result.done:
                episode_returns.append(slot.episode_return)
                slot.reset(pool.config)
            else:
                slot.obs = result.observation

    values[T] = ac.value(pool.observations())
    batch = TrajectoryBatch(
        actor_obs=actor_obs,
        critic_obs=critic_obs,
        actions=actions,
        rewards=rewards,
        dones=dones,
        old_logp=old_logp,
        values=values,
    )
    return batch, RolloutStats(episode_returns=episode_returns, successes=successes, steps=T * N)
