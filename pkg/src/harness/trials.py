"""
Frozen evaluation trial sets.

A trial set is written once and referenced by its content hash in every
evaluation report, so runs evaluated on the same file are comparable.
"""

import hashlib
import json
import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.envs.config import EnvConfig
from src.envs.palm_spin import sample_goal
from src.utils.file_io import read_json, write_json
from src.utils.seeding import STREAM_EVAL, make_rng, next_seed

TRIAL_SET_VERSION = "trials-v1"
DEFAULT_TRIAL_COUNT = 100


class Trial(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(..., ge=0)
    initial_angle: float
    target_angle: float


class TrialSet(BaseModel):
    """Fixed list of (seed, initial angle, target angle) evaluation cases."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    version: str = TRIAL_SET_VERSION
    env_name: Optional[str] = None
    feature_count: Optional[int] = Field(None, ge=1)
    trials: List[Trial]

    @property
    def size(self) -> int:
        return len(self.trials)

    def content_hash(self) -> str:
        """sha256 of the canonical JSON of the set."""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def save(self, path: str) -> str:
        return write_json(path, {**self.model_dump(mode="json"), "content_hash": self.content_hash()})

    @classmethod
    def load(cls, path: str) -> "TrialSet":
        """
        Read a trial set file.

        Raises:
            ValueError: If the stored hash does not match the content
        """
        payload = read_json(path)
        stored = payload.pop("content_hash", None)
        trial_set = cls.model_validate(payload)
        if stored is not None and stored != trial_set.content_hash():
            raise ValueError(f"Trial set {path} was modified after it was written (hash mismatch)")
        return trial_set


def generate_trial_set(
    size: int = DEFAULT_TRIAL_COUNT, seed: int = 0, env_config: Optional[EnvConfig] = None
) -> TrialSet:
    """
    Draw a trial set from the evaluation stream of a seed.

    Args:
        size: Number of trials
        seed: Master seed of the trial set
        env_config: Environment the trials are meant for; sets the goal separation
            and records the environment name and observation width

    Returns:
        TrialSet
    """
    if size < 1:
        raise ValueError("A trial set needs at least one trial")
    separation = env_config.min_goal_separation if env_config is not None else 0.5
    rng = make_rng(seed, STREAM_EVAL)
    trials = []
    for _ in range(size):
        trial_seed = next_seed(rng)
        initial = float(rng.uniform(-math.pi, math.pi))
        target = sample_goal(rng, initial, separation)
        trials.append(Trial(seed=trial_seed, initial_angle=initial, target_angle=target))
    if env_config is None:
        return TrialSet(trials=trials)
    return TrialSet(env_name=env_config.name, feature_count=env_config.schema().total_length, trials=trials)
