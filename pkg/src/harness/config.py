"""
Experiment configuration and named experiment presets.
"""

import copy
import os
from typing import Any, Callable, Dict, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.curriculum.plan import CurriculumConfig, curriculum_preset
from src.drg.generator import DrgConfig
from src.envs.config import ENV_PRESETS, EnvConfig, get_env_config
from src.envs.schema import get_schema
from src.rl.config import NetworkConfig, PpoHyper, allegro_hyper
from src.utils.file_io import read_json

load_dotenv()

DEFAULT_OUTPUT_ROOT = "runs"
DEFAULT_SEEDS = (1, 2, 3, 4, 5)

ExperimentPreset = Literal["csr3_drg", "csr2_drg", "csr2_zeros", "aac", "full_obs"]


def output_root() -> str:
    """Root directory for run outputs (CSR_OUTPUT_ROOT, default 'runs')."""
    return os.getenv("CSR_OUTPUT_ROOT", DEFAULT_OUTPUT_ROOT)


class ExperimentConfig(BaseModel):
    """Everything one training run needs; snapshotted into the run directory."""

    model_config = ConfigDict(extra="forbid")

    name: str = "run"
    preset: ExperimentPreset = "full_obs"
    env: str = "palm_spin"
    env_overrides: Dict[str, Any] = Field(default_factory=dict)
    schema_preset: Optional[str] = Field(None, description="Reference schema the env layout must match in width")
    curriculum: CurriculumConfig = Field(default_factory=CurriculumConfig)
    drg: DrgConfig = Field(default_factory=DrgConfig)
    use_drg: bool = False
    hyper: PpoHyper = Field(default_factory=PpoHyper)
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    seed: int = Field(1, ge=0)
    epochs: int = Field(1000, ge=1)
    eval_every: int = Field(50, ge=0, description="Epochs between evaluations; 0 evaluates only at the end")
    eval_trials: int = Field(100, ge=1)
    trial_set_seed: int = Field(0, ge=0)
    trial_set_path: Optional[str] = None
    marathon_duration: float = Field(30.0, gt=0)
    marathon_trials: int = Field(10, ge=0)
    record_wall_time: bool = False
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if self.env not in ENV_PRESETS:
            raise ValueError(f"Unknown environment preset '{self.env}'. Valid presets: {sorted(ENV_PRESETS)}")
        if self.schema_preset is not None:
            get_schema(self.schema_preset)
        reduces = self.curriculum.all_at_start or bool(self.curriculum.step_counts)
        if reduces and not self.use_drg:
            raise ValueError("A curriculum that reduces features needs use_drg (or DRG zeros mode)")
        return self

    def env_config(self) -> EnvConfig:
        base = get_env_config(self.env)
        if not self.env_overrides:
            return base
        return EnvConfig.model_validate(_deep_merge(base.model_dump(), self.env_overrides))

    def run_dir(self) -> str:
        if self.output_dir:
            return self.output_dir
        return os.path.join(output_root(), f"{self.name}_seed{self.seed}")

    @classmethod
    def from_json_file(cls, path: str) -> "ExperimentConfig":
        """
        Load a config file.

        A file naming a preset only needs the fields it changes; nested
        sections are merged into the preset's values.
        """
        payload = read_json(path)
        if "preset" not in payload:
            return cls.model_validate(payload)
        base = experiment_preset(payload["preset"]).model_dump()
        return cls.model_validate(_deep_merge(base, payload))


def _deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def csr3_drg() -> ExperimentConfig:
    return ExperimentConfig(name="csr3_drg", preset="csr3_drg", curriculum=curriculum_preset("csr3"), use_drg=True)


def csr2_drg() -> ExperimentConfig:
    return ExperimentConfig(name="csr2_drg", preset="csr2_drg", curriculum=curriculum_preset("csr2"), use_drg=True)


def csr2_zeros() -> ExperimentConfig:
    """csr2 with constant-zero replacement and no random layer."""
    return ExperimentConfig(
        name="csr2_zeros",
        preset="csr2_zeros",
        curriculum=curriculum_preset("csr2"),
        drg=DrgConfig(zeros_mode=True),
        use_drg=True,
    )


def aac() -> ExperimentConfig:
    """The actor never sees tactile readings: every tactile slot is zeroed from epoch 0."""
    return ExperimentConfig(
        name="aac",
        preset="aac",
        curriculum=curriculum_preset("aac"),
        drg=DrgConfig(zeros_mode=True),
        use_drg=True,
    )


def full_obs() -> ExperimentConfig:
    return ExperimentConfig(name="full_obs", preset="full_obs", curriculum=curriculum_preset("none"))


EXPERIMENT_PRESETS: Dict[str, Callable[[], ExperimentConfig]] = {
    "csr3_drg": csr3_drg,
    "csr2_drg": csr2_drg,
    "csr2_zeros": csr2_zeros,
    "aac": aac,
    "full_obs": full_obs,
}


def experiment_preset(name: str, **overrides: Any) -> ExperimentConfig:
    """
    Look up an experiment preset and apply field overrides.

    Nested sections given as dicts are merged into the preset's values.
    """
    if name not in EXPERIMENT_PRESETS:
        raise ValueError(f"Unknown experiment preset '{name}'. Valid presets: {sorted(EXPERIMENT_PRESETS)}")
    base = EXPERIMENT_PRESETS[name]()
    if not overrides:
        return base
    return ExperimentConfig.model_validate(_deep_merge(base.model_dump(), overrides))


def allegro_experiment(preset: str = "csr2_drg") -> ExperimentConfig:
    """Reference hand scale: 8192 envs, minibatch 65536, 20000 epochs, trigger at 2500."""
    return experiment_preset(
        preset,
        schema_preset="allegro_table1",
        epochs=20000,
        hyper=allegro_hyper().model_dump(),
        curriculum={"trigger_threshold": 2500.0},
    )
