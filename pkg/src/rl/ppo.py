"""
Policy-gradient losses and the minibatch update loop.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.nn.mlp import mlp_backward, mlp_forward
from src.nn.optim import AdamState, adam_init, adam_step, clip_grad_norm, global_norm
from src.nn.policy import gaussian_entropy, gaussian_logprob, gaussian_logprob_grads, policy_forward
from src.rl.actor_critic import ActorCritic
from src.rl.config import PpoHyper
from src.rl.rollout import TrajectoryBatch
from src.utils.errors import NonFiniteError, TrainingDivergedError

logger = logging.getLogger(__name__)


@dataclass
class LossReport:
    """Loss terms averaged over all minibatch updates of one epoch."""

    actor_loss: float = 0.0
    critic_loss: float = 0.0
    entropy: float = 0.0
    approx_kl: float = 0.0
    clip_fraction: float = 0.0
    grad_norm: float = 0.0
    n_updates: int = 0

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def make_optimizer(ac: ActorCritic, hyper: PpoHyper) -> AdamState:
    return adam_init(ac.parameters(), lr=hyper.lr, beta1=hyper.beta1, beta2=hyper.beta2, eps=hyper.adam_eps)


def ppo_loss_and_grads(
    ac: ActorCritic, minibatch: Dict[str, np.ndarray], hyper: PpoHyper
) -> Tuple[Dict[str, float], List[np.ndarray]]:
    """
    Loss terms and gradients for one minibatch.

    The total loss is actor_loss + value_coef * critic_loss where
    actor_loss = -surrogate - entropy_coef * entropy and
    critic_loss = 0.5 * mean((V - R)^2). In plain_pg mode the surrogate is
    mean(logp * A); in clipped mode it is mean(min(r * A, clip(r) * A)).
    The critic reads critic_obs, the actor reads actor_obs.

    Args:
        ac: Actor-critic
        minibatch: Flat arrays with keys actor_obs, critic_obs, actions, old_logp, advantages, returns
        hyper: Hyper-parameters

    Returns:
        Tuple of (loss terms, gradients aligned with ac.parameters())
    """
    obs = minibatch["actor_obs"]
    actions = minibatch["actions"]
    adv = minibatch["advantages"]
    batch = obs.shape[0]

    mean, log_std, actor_cache = policy_forward(ac.actor, obs)
    logp = gaussian_logprob(mean, log_std, actions)
    log_ratio = logp - minibatch["old_logp"]
    ratio = np.exp(log_ratio)

    if hyper.objective_mode == "plain_pg":
        surrogate = float(np.mean(logp * adv))
        dlogp = -adv / batch
        clip_fraction = 0.0
    else:
        eps = hyper.clip_eps
        unclipped = ratio * adv
        clipped = np.clip(ratio, 1.0 - eps, 1.0 + eps) * adv
        surrogate = float(np.mean(np.minimum(unclipped, clipped)))
        inside = (ratio >= 1.0 - eps) & (ratio <= 1.0 + eps)
        active = (unclipped < clipped) | inside
        dlogp = -(adv * ratio * active) / batch
        clip_fraction = float(np.mean(~inside))

    entropy = gaussian_entropy(log_std)
    actor_loss = -surrogate - hyper.entropy_coef * entropy

    d_mean, d_log_std = gaussian_logprob_grads(mean, log_std, actions)
    grad_mean = dlogp[:, None] * d_mean
    grad_log_std = np.sum(dlogp[:, None] * d_log_std, axis=0) - hyper.entropy_coef
    actor_grads = mlp_backward(actor_cache, grad_mean).arrays()

    values, critic_cache = mlp_forward(ac.critic, minibatch["critic_obs"])
    diff = values[:, 0] - minibatch["returns"]
    critic_loss = 0.5 * float(np.mean(diff * diff))
    grad_values = (hyper.value_coef * diff / batch)[:, None]
    critic_grads = mlp_backward(critic_cache, grad_values).arrays()

    terms = {
        "loss": actor_loss + hyper.value_coef * critic_loss,
        "actor_loss": actor_loss,
        "critic_loss": critic_loss,
        "entropy": entropy,
        "approx_kl": float(np.mean((ratio - 1.0) - log_ratio)),
        "clip_fraction": clip_fraction,
    }
    return terms, actor_grads + [np.asarray(grad_log_std, dtype=np.float64)] + critic_grads


def ppo_update(
    ac: ActorCritic,
    batch: TrajectoryBatch,
    hyper: PpoHyper,
    optimizer: AdamState,
    rng: np.random.Generator,
    epoch: Optional[int] = None,
) -> Tuple[ActorCritic, AdamState, LossReport]:
    """
    Run update_epochs passes of shuffled minibatch updates.

    The DRG layer is not a parameter of the actor-critic, so no gradient
    reaches it; actor_obs already holds the transformed observations.

    Args:
        ac: Actor-critic to update
        batch: Batch with advantages and returns filled in
        hyper: Hyper-parameters
        optimizer: Adam state matching ac.parameters()
        rng: Learner stream for minibatch shuffles
        epoch: Epoch number for diagnostics

    Returns:
        Tuple of (updated actor-critic, optimizer state, averaged loss report)

    Raises:
        TrainingDivergedError: On a non-finite loss or gradient
    """
    data = batch.flatten()
    size = batch.batch_size
    minibatch = min(hyper.minibatch_size, size)
    totals = LossReport()

    for pass_index in range(hyper.update_epochs):
        order = rng.permutation(size)
        for mb_index, start in enumerate(range(0, size, minibatch)):
            idx = order[start : start + minibatch]
            terms, grads = ppo_loss_and_grads(ac, {k: v[idx] for k, v in data.items()}, hyper)
            diagnostics = {
                "epoch": epoch,
                "update_pass": pass_index,
                "minibatch": mb_index,
                "loss_terms": terms,
                "parameter_norm": global_norm(ac.parameters()),
            }
            if not np.isfinite(terms["loss"]):
                raise TrainingDivergedError("Non-finite loss during policy update", diagnostics)
            grads, norm = clip_grad_norm(grads, hyper.max_grad_norm)
            try:
                params, optimizer = adam_step(ac.parameters(), grads, optimizer)
            except NonFiniteError as e:
                raise TrainingDivergedError(str(e), {**diagnostics, "grad_norm": norm}) from e
            ac = ac.with_parameters(params)

            totals.actor_loss += terms["actor_loss"]
            totals.critic_loss += terms["critic_loss"]
            totals.entropy += terms["entropy"]
            totals.approx_kl += terms["approx_kl"]
            totals.clip_fraction += terms["clip_fraction"]
            totals.grad_norm += norm
            totals.n_updates += 1

    n = max(1, totals.n_updates)
    report = LossReport(
        actor_loss=totals.actor_loss / n,
        critic_loss=totals.critic_loss / n,
        entropy=totals.entropy / n,
        approx_kl=totals.approx_kl / n,
        clip_fraction=totals.clip_fraction / n,
        grad_norm=totals.grad_norm / n,
        n_updates=totals.n_updates,
    )
    logger.debug("Update epoch %s: %s", epoch, report.to_dict())
    return ac, optimizer, report
