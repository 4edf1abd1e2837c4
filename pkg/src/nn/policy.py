"""
Diagonal Gaussian policy head with a state-independent, learned log std.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.nn.mlp import MlpCache, MlpParams, build_mlp, mlp_forward

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class GaussianPolicyHead:
    """Mean network plus one log std per action dimension."""

    mean_net: MlpParams
    log_std: np.ndarray

    def __post_init__(self):
        self.log_std = np.clip(np.asarray(self.log_std, dtype=np.float64), LOG_STD_MIN, LOG_STD_MAX)
        if self.log_std.shape != (self.mean_net.output_dim,):
            raise ValueError(
                f"log_std has shape {self.log_std.shape}, expected ({self.mean_net.output_dim},)"
            )
        if self.mean_net.activations[-1] != "identity":
            raise ValueError("The policy mean network must end in an identity layer")

    @property
    def action_dim(self) -> int:
        return self.mean_net.output_dim

    def copy(self) -> "GaussianPolicyHead":
        return GaussianPolicyHead(self.mean_net.copy(), self.log_std.copy())


def build_policy_head(
    obs_dim: int,
    action_dim: int,
    hidden: Sequence[int],
    rng: np.random.Generator,
    init_log_std: float = -0.5,
    output_gain: float = 0.01,
) -> GaussianPolicyHead:
    """Build a tanh-hidden policy head whose last layer starts near zero."""
    mean_net = build_mlp([obs_dim, *hidden, action_dim], rng, output_gain=output_gain)
    return GaussianPolicyHead(mean_net, np.full(action_dim, float(init_log_std)))


def policy_forward(head: GaussianPolicyHead, obs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, MlpCache]:
    """Return (mean, log_std, cache) for an observation or batch."""
    mean, cache = mlp_forward(head.mean_net, obs)
    return mean, head.log_std, cache


def _check_shapes(mean: np.ndarray, log_std: np.ndarray, action: np.ndarray) -> None:
    if mean.shape != action.shape:
        raise ValueError(f"mean shape {mean.shape} does not match action shape {action.shape}")
    if log_std.shape != mean.shape[-1:]:
        raise ValueError(f"log_std shape {log_std.shape} does not match action dim {mean.shape[-1]}")


def gaussian_logprob(mean: np.ndarray, log_std: np.ndarray, action: np.ndarray):
    """
    Log density of a diagonal Gaussian, summed over the last axis.

    Args:
        mean: Means (..., A)
        log_std: Log standard deviations (A,)
        action: Actions (..., A)

    Returns:
        Scalar for a single action, array of shape (...) for a batch
    """
    mean = np.asarray(mean, dtype=np.float64)
    log_std = np.asarray(log_std, dtype=np.float64)
    action = np.asarray(action, dtype=np.float64)
    _check_shapes(mean, log_std, action)
    z = (action - mean) * np.exp(-log_std)
    logp = np.sum(-0.5 * z * z - log_std - 0.5 * LOG_2PI, axis=-1)
    return float(logp) if np.ndim(logp) == 0 else logp


def gaussian_logprob_grads(
    mean: np.ndarray, log_std: np.ndarray, action: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-sample derivatives of the log density.

    Returns:
        Tuple of (dlogp/dmean with the shape of mean, dlogp/dlog_std with the shape of mean)
    """
    _check_shapes(mean, log_std, action)
    inv_var = np.exp(-2.0 * log_std)
    diff = action - mean
    d_mean = diff * inv_var
    d_log_std = diff * diff * inv_var - 1.0
    return d_mean, d_log_std


def gaussian_entropy(log_std: np.ndarray) -> float:
    """Entropy of a diagonal Gaussian."""
    return float(np.sum(log_std + 0.5 * (LOG_2PI + 1.0)))


def gaussian_policy_sample(
    mean: np.ndarray, log_std: np.ndarray, rng: np.random.Generator
) -> Tuple[np.ndarray, float]:
    """
    Sample an action and its log probability.

    The action is not clamped here; environments clamp at their boundary so
    the returned logp always matches gaussian_logprob(mean, log_std, action).
    """
    mean = np.asarray(mean, dtype=np.float64)
    action = mean + np.exp(log_std) * rng.standard_normal(mean.shape)
    return action, gaussian_logprob(mean, log_std, action)
