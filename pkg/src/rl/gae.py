"""
Generalized advantage estimation.
"""

from typing import Tuple

import numpy as np


def normalize_advantages(advantages: np.ndarray) -> np.ndarray:
    """Zero mean, unit std over the whole batch."""
    return (advantages - np.mean(advantages)) / max(1e-6, float(np.std(advantages)))


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    gamma: float,
    lam: float,
    normalize: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Advantages and returns for a (T, ...) rollout.

    Args:
        rewards: Rewards, shape (T,) or (T, N)
        values: Critic values including the bootstrap value, shape (T + 1, ...)
        dones: Episode-end flags after each step, same shape as rewards
        gamma: Discount factor
        lam: GAE lambda
        normalize: Normalize the advantages per batch

    Returns:
        Tuple of (advantages, returns) where returns = raw advantages + values[:-1]
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    if values.shape[0] != rewards.shape[0] + 1 or values.shape[1:] != rewards.shape[1:]:
        raise ValueError(f"values shape {values.shape} must be rewards shape {rewards.shape} plus one step")
    if dones.shape != rewards.shape:
        raise ValueError(f"dones shape {dones.shape} does not match rewards shape {rewards.shape}")

    advantages = np.zeros_like(rewards)
    last = np.zeros(rewards.shape[1:])
    for t in reversed(range(rewards.shape[0])):
        nonterminal = 1.0 - dones[t]
        delta = rewards[t] + gamma * values[t + 1] * nonterminal - values[t]
        last = delta + gamma * lam * nonterminal * last
        advantages[t] = last
    returns = advantages + values[:-1]
    if normalize:
        advantages = normalize_advantages(advantages)
    return advantages, returns
