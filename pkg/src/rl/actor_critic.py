"""
Actor-critic pair. Both networks take the full-width observation; the
asymmetry is in content: the critic reads true values, the actor reads the
DRG-transformed observation.
"""

import hashlib
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

import numpy as np

from src.nn.mlp import MlpParams, build_mlp, mlp_forward
from src.nn.policy import LOG_STD_MAX, LOG_STD_MIN, GaussianPolicyHead, build_policy_head
from src.nn.serialization import mlp_from_dict, mlp_to_dict, policy_head_from_dict, policy_head_to_dict
from src.rl.config import NetworkConfig


@dataclass
class ActorCritic:
    actor: GaussianPolicyHead
    critic: MlpParams

    def __post_init__(self):
        if self.actor.mean_net.input_dim != self.critic.input_dim:
            raise ValueError("Actor and critic must take the same observation width")
        if self.critic.output_dim != 1:
            raise ValueError("The critic must output a scalar")

    @property
    def obs_dim(self) -> int:
        return self.critic.input_dim

    @property
    def action_dim(self) -> int:
        return self.actor.action_dim

    def parameters(self) -> List[np.ndarray]:
        """Flat list: actor layers, log_std, critic layers."""
        return self.actor.mean_net.arrays() + [self.actor.log_std] + self.critic.arrays()

    def with_parameters(self, arrays: Sequence[np.ndarray]) -> "ActorCritic":
        n_actor = len(self.actor.mean_net.arrays())
        mean_net = MlpParams.from_arrays(arrays[:n_actor], self.actor.mean_net.activations)
        log_std = np.clip(arrays[n_actor], LOG_STD_MIN, LOG_STD_MAX)
        critic = MlpParams.from_arrays(arrays[n_actor + 1:], self.critic.activations)
        return ActorCritic(GaussianPolicyHead(mean_net, log_std), critic)

    def value(self, obs: np.ndarray) -> np.ndarray:
        """Critic value for an observation (scalar) or batch (B,)."""
        out, _ = mlp_forward(self.critic, obs)
        return out[..., 0]

    def mean_action(self, actor_obs: np.ndarray) -> np.ndarray:
        out, _ = mlp_forward(self.actor.mean_net, actor_obs)
        return out

    def checksum(self) -> str:
        digest = hashlib.sha256()
        for array in self.parameters():
            digest.update(np.ascontiguousarray(array, dtype=np.float64).tobytes())
        return digest.hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return {"actor": policy_head_to_dict(self.actor), "critic": mlp_to_dict(self.critic)}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ActorCritic":
        return cls(policy_head_from_dict(payload["actor"]), mlp_from_dict(payload["critic"]))


def build_actor_critic(obs_dim: int, action_dim: int, network: NetworkConfig, rng: np.random.Generator) -> ActorCritic:
    actor = build_policy_head(
        obs_dim,
        action_dim,
        network.actor_hidden,
        rng,
        init_log_std=network.init_log_std,
        output_gain=network.policy_output_gain,
    )
    critic = build_mlp([obs_dim, *network.critic_hidden, 1], rng)
    return ActorCritic(actor, critic)
