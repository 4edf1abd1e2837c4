"""
Versioned JSON checkpoints of the actor-critic and DRG state.
"""

from dataclasses import dataclass
from typing import Any, Dict

from src.drg.generator import DrgConfig, DrgState
from src.envs.config import EnvConfig
from src.rl.actor_critic import ActorCritic
from src.utils.file_io import read_json, write_json

CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    ac: ActorCritic
    drg_state: DrgState
    drg_config: DrgConfig
    env_config: EnvConfig
    epoch: int
    seed: int
    experiment: Dict[str, Any]


def save_checkpoint(path: str, checkpoint: Checkpoint) -> str:
    return write_json(
        path,
        {
            "version": CHECKPOINT_VERSION,
            "actor_critic": checkpoint.ac.to_dict(),
            "drg_state": checkpoint.drg_state.to_dict(),
            "drg_config": checkpoint.drg_config.model_dump(mode="json"),
            "env_config": checkpoint.env_config.model_dump(mode="json"),
            "epoch": checkpoint.epoch,
            "seed": checkpoint.seed,
            "experiment": checkpoint.experiment,
        },
    )


def load_checkpoint(path: str) -> Checkpoint:
    """
    Read a checkpoint written by save_checkpoint.

    Raises:
        ValueError: On a version mismatch or a DRG width that disagrees with the networks
    """
    payload = read_json(path)
    version = payload.get("version")
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"Checkpoint version {version} is not supported (expected {CHECKPOINT_VERSION})")
    ac = ActorCritic.from_dict(payload["actor_critic"])
    drg_state = DrgState.from_dict(payload["drg_state"])
    if drg_state.n != ac.obs_dim:
        raise ValueError(f"DRG width {drg_state.n} does not match network input width {ac.obs_dim}")
    return Checkpoint(
        ac=ac,
        drg_state=drg_state,
        drg_config=DrgConfig.model_validate(payload["drg_config"]),
        env_config=EnvConfig.model_validate(payload["env_config"]),
        epoch=int(payload["epoch"]),
        seed=int(payload["seed"]),
        experiment=payload.get("experiment", {}),
    )
