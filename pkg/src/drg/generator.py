"""
Deep random generator (DRG).

Reduced observation slots are overwritten with fresh N(delta, sigma^2)
samples every step (or zeros in the zeros baseline), then the whole
observation goes through one square linear layer phi. phi is redrawn at the
start of every training epoch: the identity with probability alpha, otherwise
a Xavier-normal matrix. phi is never trained.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.nn.mlp import xavier_init


class DrgConfig(BaseModel):
    """Replacement distribution and random-layer mixture."""

    model_config = ConfigDict(extra="forbid")

    delta: float = Field(0.0, description="Replacement mean")
    sigma: float = Field(1.0, ge=0.0, description="Replacement std")
    alpha: float = Field(0.5, ge=0.0, le=1.0, description="Probability that phi is the identity")
    eval_mode: Literal["clean_identity", "sampled_layer"] = "clean_identity"
    zeros_mode: bool = False
    active_from_start: bool = False


@dataclass
class DrgState:
    """Current mask and random layer."""

    n: int
    mask: Tuple[int, ...] = ()
    phi: Optional[np.ndarray] = field(default=None, repr=False)
    epoch_of_phi: int = -1
    active: bool = False

    @property
    def phi_is_identity(self) -> bool:
        return self.phi is None

    def phi_matrix(self) -> np.ndarray:
        return np.eye(self.n) if self.phi is None else self.phi

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "mask": list(self.mask),
            "phi": None if self.phi is None else self.phi.ravel().tolist(),
            "phi_is_identity": self.phi is None,
            "epoch_of_phi": self.epoch_of_phi,
            "active": self.active,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "DrgState":
        n = int(payload["n"])
        phi = payload.get("phi")
        return cls(
            n=n,
            mask=tuple(int(i) for i in payload["mask"]),
            phi=None if phi is None else np.asarray(phi, dtype=np.float64).reshape(n, n),
            epoch_of_phi=int(payload["epoch_of_phi"]),
            active=bool(payload["active"]),
        )


def initial_state(n: int, config: DrgConfig) -> DrgState:
    """Identity transform; active only when the config asks for it."""
    if n < 1:
        raise ValueError("Observation width must be positive")
    return DrgState(n=n, active=config.active_from_start)


def sample_replacement(
    mask_size: int, delta: float, sigma: float, rng: np.random.Generator, zeros_mode: bool = False, batch: Optional[int] = None
) -> np.ndarray:
    """
    Draw replacement values for the masked slots.

    Args:
        mask_size: Number of masked slots
        delta: Mean
        sigma: Standard deviation
        rng: Random stream
        zeros_mode: Return zeros instead (no draws are made)
        batch: Optional leading batch dimension

    Returns:
        Array of shape (mask_size,) or (batch, mask_size)
    """
    shape = (mask_size,) if batch is None else (batch, mask_size)
    if zeros_mode:
        return np.zeros(shape)
    return delta + sigma * rng.standard_normal(shape)


def init_random_layer(n: int, alpha: float, rng: np.random.Generator) -> Optional[np.ndarray]:
    """
    Draw phi from the identity / Xavier mixture.

    Returns:
        None for the identity, otherwise an (n, n) matrix with entries N(0, 1/n)
    """
    if n < 1:
        raise ValueError("Random layer width must be positive")
    if rng.random() < alpha:
        return None
    return xavier_init(n, n, rng)


def apply_drg(obs: np.ndarray, state: DrgState, config: DrgConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Compute F(x, phi) for an observation or a batch of observations.

    Args:
        obs: Observation (n,) or batch (B, n)
        state: DRG state
        config: DRG configuration
        rng: Stream for replacement samples

    Returns:
        Transformed observation; obs itself when DRG is inactive
    """
    obs = np.asarray(obs, dtype=np.float64)
    if obs.shape[-1] != state.n:
        raise ValueError(f"Observation width {obs.shape[-1]} does not match DRG width {state.n}")
    if not state.active:
        return obs
    out = obs.copy()
    if state.mask:
        idx = list(state.mask)
        batch = None if obs.ndim == 1 else obs.shape[0]
        out[..., idx] = sample_replacement(len(idx), config.delta, config.sigma, rng, config.zeros_mode, batch)
    if state.phi is not None:
        out = out @ state.phi.T
    return out


def epoch_reinit(state: DrgState, config: DrgConfig, epoch: int, rng: np.random.Generator) -> DrgState:
    """Redraw phi for a new epoch; inactive states and the zeros baseline keep the identity."""
    if not state.active:
        return state
    phi = None if config.zeros_mode else init_random_layer(state.n, config.alpha, rng)
    return replace(state, phi=phi, epoch_of_phi=epoch)


def extend_mask(state: DrgState, indices: Iterable[int], reducible: Iterable[int]) -> DrgState:
    """
    Add reduced features to the mask and activate DRG.

    Raises:
        ValueError: If an index is not a reducible feature
    """
    allowed = set(reducible)
    new = set(int(i) for i in indices)
    bad = sorted(new - allowed)
    if bad:
        raise ValueError(f"Features {bad} are not reducible")
    return replace(state, mask=tuple(sorted(set(state.mask) | new)), active=True)


def eval_view(state: DrgState, config: DrgConfig) -> DrgState:
    """State used by deployment-style evaluation (clean identity layer by default)."""
    if config.eval_mode == "clean_identity":
        return replace(state, phi=None)
    return state
