"""
Trainer hyper-parameters and network sizes.
"""

from typing import Callable, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class PpoHyper(BaseModel):
    """Rollout and update settings. One epoch = one collect-then-update iteration."""

    model_config = ConfigDict(extra="forbid")

    gamma: float = Field(0.99, gt=0.0, le=1.0)
    gae_lambda: float = Field(0.95, ge=0.0, le=1.0)
    clip_eps: float = Field(0.2, gt=0.0)
    update_epochs: int = Field(4, ge=1)
    minibatch_size: int = Field(1024, ge=1)
    lr: float = Field(3e-4, gt=0.0)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)
    entropy_coef: float = Field(0.0, ge=0.0)
    value_coef: float = Field(0.5, ge=0.0)
    max_grad_norm: Optional[float] = Field(0.5, gt=0.0)
    horizon: int = Field(64, ge=1)
    n_envs: int = Field(64, ge=1)
    objective_mode: Literal["clipped", "plain_pg"] = "clipped"


class NetworkConfig(BaseModel):
    """Actor and critic widths and policy initialization."""

    model_config = ConfigDict(extra="forbid")

    actor_hidden: List[int] = Field(default_factory=lambda: [64, 64])
    critic_hidden: List[int] = Field(default_factory=lambda: [64, 64])
    init_log_std: float = -0.5
    policy_output_gain: float = Field(0.01, gt=0.0)

    @field_validator("actor_hidden", "critic_hidden")
    @classmethod
    def _positive_widths(cls, value: List[int]) -> List[int]:
        if any(width < 1 for width in value):
            raise ValueError("Hidden widths must be positive")
        return value


def desk_hyper() -> PpoHyper:
    return PpoHyper()


def allegro_hyper() -> PpoHyper:
    """Large-scale settings of the reference hand setup (8192 envs, minibatch 65536)."""
    return PpoHyper(n_envs=8192, minibatch_size=65536, horizon=8)


HYPER_PRESETS: Dict[str, Callable[[], PpoHyper]] = {
    "desk": desk_hyper,
    "allegro": allegro_hyper,
}


def get_hyper(name: str) -> PpoHyper:
    if name not in HYPER_PRESETS:
        raise ValueError(f"Unknown hyper-parameter preset '{name}'. Valid presets: {sorted(HYPER_PRESETS)}")
    return HYPER_PRESETS[name]()
