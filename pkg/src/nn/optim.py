"""
Adam optimizer over flat lists of numpy arrays.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from src.utils.errors import NonFiniteError


@dataclass
class AdamState:
    """Moment estimates and hyper-parameters of one Adam optimizer."""

    first_moment: List[np.ndarray] = field(default_factory=list)
    second_moment: List[np.ndarray] = field(default_factory=list)
    step_count: int = 0
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(
    params: Sequence[np.ndarray], lr: float = 3e-4, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8
) -> AdamState:
    """Zero-initialized moments matching the parameter shapes."""
    return AdamState(
        first_moment=[np.zeros_like(p, dtype=np.float64) for p in params],
        second_moment=[np.zeros_like(p, dtype=np.float64) for p in params],
        step_count=0,
        lr=lr,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def global_norm(arrays: Sequence[np.ndarray]) -> float:
    return float(np.sqrt(sum(float(np.sum(a * a)) for a in arrays)))


def clip_grad_norm(grads: Sequence[np.ndarray], max_norm: float) -> Tuple[List[np.ndarray], float]:
    """
    Rescale gradients so their global norm is at most max_norm.

    Returns:
        Tuple of (possibly rescaled gradients, norm before clipping)
    """
    norm = global_norm(grads)
    if max_norm is None or norm <= max_norm or norm == 0.0:
        return list(grads), norm
    scale = max_norm / norm
    return [g * scale for g in grads], norm


def adam_step(
    params: Sequence[np.ndarray], grads: Sequence[np.ndarray], state: AdamState
) -> Tuple[List[np.ndarray], AdamState]:
    """
    Apply one bias-corrected Adam update.

    Args:
        params: Current parameters
        grads: Gradients of the loss, same shapes as params
        state: Optimizer state

    Returns:
        Tuple of (new parameters, new state); inputs are not modified
    """
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ValueError("params, grads and optimizer state must have the same length")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"Gradient shape {g.shape} does not match parameter shape {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteError("Adam received a non-finite gradient")

    t = state.step_count + 1
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1**t
    bias2 = 1.0 - b2**t

    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g * g
        m_hat = m / bias1
        v_hat = v / bias2
        new_params.append(p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
        new_m.append(m)
        new_v.append(v)

    new_state = AdamState(
        first_moment=new_m,
        second_moment=new_v,
        step_count=t,
        lr=state.lr,
        beta1=b1,
        beta2=b2,
        eps=state.eps,
    )
    return new_params, new_state
