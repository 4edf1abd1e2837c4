"""
Environment configuration models and named presets.

The toy reward, initial pose distribution and tactile normalization are
modelling decisions, not measured values; every one of them is a field here.
"""

import math
from typing import Callable, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.envs.schema import FeatureSchema, build_schema


class ServoSpec(BaseModel):
    """Rate-limited goal-seeking servo."""

    model_config = ConfigDict(extra="forbid")

    v_max: float = Field(6.0, gt=0, description="Max joint speed (rad/s)")
    gain: float = Field(30.0, gt=0, description="Proportional speed gain (1/s)")
    accel_max: Optional[float] = Field(None, gt=0, description="Max joint acceleration (rad/s^2); when set, the servo re-plans from rest on every new command")


class SensorSpec(BaseModel):
    """One channel of the tactile bank."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["contact", "duplicate", "noise"]
    source: int = Field(0, ge=0, description="Finger index (contact) or tactile index (duplicate)")
    activation_rate: float = Field(0.0, ge=0.0, le=1.0, description="Firing probability per step (noise)")
    noise_std: float = Field(0.01, ge=0.0, description="Additive reading noise (duplicate)")


class EnvConfig(BaseModel):
    """Planar palm-spin rotation task with a configurable tactile bank."""

    model_config = ConfigDict(extra="forbid")

    name: str = "palm_spin"
    n_fingers: int = Field(3, ge=1)
    finger_directions: Optional[List[float]] = None
    q_max: float = Field(1.0, gt=0, description="Joint range (rad)")
    q_contact: float = Field(0.3, ge=0, description="Extension at which a fingertip touches the disk (rad)")
    contact_stiffness: float = Field(10.0, gt=0, description="Fingertip force per rad of extension (N/rad)")
    lever_arm: float = Field(0.02, gt=0, description="Contact radius (m)")
    inertia: float = Field(0.002, gt=0, description="Disk inertia I_z (kg m^2)")
    damping: float = Field(0.02, ge=0, description="Viscous damping (N m s/rad)")
    servo: ServoSpec = Field(default_factory=ServoSpec)
    sim_dt: float = Field(1.0 / 60.0, gt=0)
    control_every: int = Field(2, ge=1)
    success_tol_train: float = Field(0.1, gt=0)
    success_tol_eval: float = Field(0.4, gt=0)
    episode_length: float = Field(10.0, gt=0, description="Seconds")
    obs_noise_std: float = Field(0.0, ge=0)
    act_noise_std: float = Field(0.0, ge=0)
    resample_on_success: bool = True
    min_goal_separation: float = Field(0.5, ge=0)
    reward_error_coef: float = Field(1.0 / math.pi, ge=0)
    success_bonus: float = Field(250.0, ge=0)
    force_cap: Optional[float] = Field(None, gt=0, description="Force mapped to reading 1.0; defaults to the max fingertip force")
    joint_velocity_scale: float = Field(6.0, gt=0)
    omega_scale: float = Field(10.0, gt=0)
    tactile: List[SensorSpec] = Field(default_factory=list)

    @field_validator("tactile")
    @classmethod
    def _tactile_not_empty(cls, value: List[SensorSpec]) -> List[SensorSpec]:
        if not value:
            raise ValueError("The tactile bank needs at least one sensor")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "EnvConfig":
        if self.success_tol_train >= self.success_tol_eval:
            raise ValueError("success_tol_train must be smaller than success_tol_eval")
        if self.q_contact >= self.q_max:
            raise ValueError("q_contact must lie inside the joint range")
        if self.finger_directions is not None and len(self.finger_directions) != self.n_fingers:
            raise ValueError("finger_directions needs one entry per finger")
        for i, sensor in enumerate(self.tactile):
            if sensor.kind == "contact" and sensor.source >= self.n_fingers:
                raise ValueError(f"Tactile sensor {i} reads finger {sensor.source}, which does not exist")
            if sensor.kind == "duplicate":
                if sensor.source >= len(self.tactile) or self.tactile[sensor.source].kind != "contact":
                    raise ValueError(f"Tactile sensor {i} must duplicate a contact sensor")
        return self

    @property
    def n_tactile(self) -> int:
        return len(self.tactile)

    @property
    def directions(self) -> List[float]:
        if self.finger_directions is not None:
            return list(self.finger_directions)
        return [1.0 if k % 2 == 0 else -1.0 for k in range(self.n_fingers)]

    @property
    def max_force(self) -> float:
        return self.contact_stiffness * (self.q_max - self.q_contact)

    @property
    def reading_cap(self) -> float:
        return self.force_cap if self.force_cap is not None else self.max_force

    @property
    def control_dt(self) -> float:
        return self.sim_dt * self.control_every

    @property
    def sim_rate(self) -> float:
        return 1.0 / self.sim_dt

    @property
    def max_steps(self) -> int:
        return max(1, int(round(self.episode_length / self.control_dt)))

    def schema(self) -> FeatureSchema:
        """Observation layout produced by this configuration."""
        n = self.n_fingers
        tactile_names = []
        for i, sensor in enumerate(self.tactile):
            if sensor.kind == "contact":
                tactile_names.append(f"tactile_{i}_contact_f{sensor.source}")
            elif sensor.kind == "duplicate":
                tactile_names.append(f"tactile_{i}_duplicate_t{sensor.source}")
            else:
                tactile_names.append(f"tactile_{i}_noise_{sensor.activation_rate:g}")
        return build_schema(
            self.name,
            [
                ("joint_position", n, False, [f"q_{k}" for k in range(n)]),
                ("joint_velocity", n, False, [f"qdot_{k}" for k in range(n)]),
                ("joint_torque", n, False, [f"torque_{k}" for k in range(n)]),
                ("object", 3, False, ["object_cos", "object_sin", "object_omega"]),
                ("target", 2, False, ["target_cos", "target_sin"]),
                ("tactile", self.n_tactile, True, tactile_names),
            ],
        )


def _contacts(n_fingers: int) -> List[SensorSpec]:
    return [SensorSpec(kind="contact", source=k) for k in range(n_fingers)]


def palm_spin() -> EnvConfig:
    """Default: 3 fingers, 13 tactile channels (3 contact, 4 duplicates, 6 noise)."""
    tactile = _contacts(3)
    tactile += [SensorSpec(kind="duplicate", source=s) for s in (0, 1, 2, 0)]
    tactile += [SensorSpec(kind="noise", activation_rate=r) for r in (0.35, 0.25, 0.15, 0.1, 0.05, 0.02)]
    return EnvConfig(name="palm_spin", tactile=tactile)


def palm_spin_small() -> EnvConfig:
    """3 contact, 2 duplicates, 3 noise channels: 22 features."""
    tactile = _contacts(3)
    tactile += [SensorSpec(kind="duplicate", source=s) for s in (0, 1)]
    tactile += [SensorSpec(kind="noise", activation_rate=r) for r in (0.3, 0.1, 0.05)]
    return EnvConfig(name="palm_spin_small", tactile=tactile)


def palm_spin_easy() -> EnvConfig:
    """Heavily damped disk: speed follows finger force almost immediately."""
    config = palm_spin()
    return config.model_copy(update={"name": "palm_spin_easy", "damping": 0.05})


PLANTED_RATES = (0.9, 0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02)


def planted_importance() -> EnvConfig:
    """Diagnostic bank of noise channels with known activation rates."""
    tactile = [SensorSpec(kind="noise", activation_rate=r) for r in PLANTED_RATES]
    return EnvConfig(name="planted_importance", tactile=tactile)


def rate_sweep_servo() -> EnvConfig:
    """Servos that restart from rest on each new command."""
    config = palm_spin()
    return config.model_copy(
        update={"name": "rate_sweep_servo", "servo": ServoSpec(v_max=4.0, gain=50.0, accel_max=60.0)}
    )


ENV_PRESETS: Dict[str, Callable[[], EnvConfig]] = {
    "palm_spin": palm_spin,
    "palm_spin_small": palm_spin_small,
    "palm_spin_easy": palm_spin_easy,
    "planted_importance": planted_importance,
    "rate_sweep_servo": rate_sweep_servo,
}


def get_env_config(name: str) -> EnvConfig:
    """Look up an environment preset by name."""
    if name not in ENV_PRESETS:
        raise ValueError(f"Unknown environment preset '{name}'. Valid presets: {sorted(ENV_PRESETS)}")
    return ENV_PRESETS[name]()
