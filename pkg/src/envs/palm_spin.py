"""
Planar palm-spin rotation task.

A disk rests on the palm and rotates about its axis. Each finger is a
rate-limited servo; once a fingertip extends past q_contact it presses on the
disk with a force proportional to the extra extension, which turns the disk
in that finger's direction. The policy must rotate the disk to a randomly
drawn target angle.

Physics is explicit Euler with viscous damping, sim_dt substeps per call to
physics_substep, control_every substeps per env_step.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.envs.config import EnvConfig
from src.envs.servo import ServoState, actuator_track
from src.utils.seeding import make_rng

NOISE_READING_LOW = 0.5


def wrap_angle(angle):
    """Wrap an angle (or array of angles) to [-pi, pi)."""
    wrapped = (np.asarray(angle, dtype=np.float64) + math.pi) % (2.0 * math.pi) - math.pi
    return float(wrapped) if wrapped.ndim == 0 else wrapped


@dataclass
class EnvState:
    """Mutable state of one environment instance."""

    theta: float
    omega: float
    target_theta: float
    servo: ServoState
    contact_forces: np.ndarray
    rng: np.random.Generator
    success_tol: float
    elapsed_steps: int = 0
    goals_reached: int = 0
    done: bool = False
    config: EnvConfig = field(default=None, repr=False)


@dataclass
class StepResult:
    """Outcome of one control step."""

    observation: np.ndarray
    reward: float
    done: bool
    success: bool
    info: Dict[str, Any]


class TrackingRecorder:
    """Accumulates per-joint squared errors between servo positions and the command being held."""

    def __init__(self, n_joints: int):
        self.sq_err = np.zeros(n_joints)
        self.count = 0

    def record(self, actual: np.ndarray, commanded: np.ndarray) -> None:
        diff = actual - commanded
        self.sq_err += diff * diff
        self.count += 1

    def rmse(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros_like(self.sq_err)
        return np.sqrt(self.sq_err / self.count)


def sample_goal(
    rng: np.random.Generator, current_theta: Optional[float] = None, min_separation: float = 0.0
) -> float:
    """
    Draw a target angle uniformly from [-pi, pi).

    Args:
        rng: Random stream
        current_theta: Angle the target must stay away from, if any
        min_separation: Minimum wrapped distance to current_theta (rad)

    Returns:
        Target angle
    """
    if min_separation >= math.pi:
        raise ValueError("min_separation must be smaller than pi")
    while True:
        goal = float(rng.uniform(-math.pi, math.pi))
        if current_theta is None or abs(wrap_angle(goal - current_theta)) >= min_separation:
            return goal


def contact_forces(config: EnvConfig, positions: np.ndarray) -> np.ndarray:
    """Fingertip normal force for each finger (N)."""
    return config.contact_stiffness * np.maximum(0.0, positions - config.q_contact)


def env_reset(
    config: EnvConfig,
    seed: int,
    evaluation: bool = False,
    initial_angle: Optional[float] = None,
    target_angle: Optional[float] = None,
) -> Tuple[EnvState, np.ndarray]:
    """
    Start a new episode.

    Args:
        config: Environment configuration
        seed: Episode seed; identical (config, seed) gives identical episodes
        evaluation: Use the evaluation success tolerance
        initial_angle: Override the random initial disk angle
        target_angle: Override the random target angle

    Returns:
        Tuple of (state, first observation)
    """
    rng = make_rng(seed)
    theta = float(rng.uniform(-math.pi, math.pi)) if initial_angle is None else float(wrap_angle(initial_angle))
    if target_angle is None:
        target = sample_goal(rng, theta, config.min_goal_separation)
    else:
        target = float(wrap_angle(target_angle))
    servo = ServoState.at_rest(config.n_fingers)
    state = EnvState(
        theta=theta,
        omega=0.0,
        target_theta=target,
        servo=servo,
        contact_forces=contact_forces(config, servo.position),
        rng=rng,
        success_tol=config.success_tol_eval if evaluation else config.success_tol_train,
        config=config,
    )
    obs, _ = observe(state, config)
    return state, obs


def physics_substep(state: EnvState, config: EnvConfig, command: np.ndarray) -> None:
    """Advance servos and the disk by one sim_dt (in place)."""
    dt = config.sim_dt
    state.servo = actuator_track(state.servo, command, dt, config.servo)
    forces = contact_forces(config, state.servo.position)
    torque = float(np.dot(config.directions, forces)) * config.lever_arm
    alpha = (torque - config.damping * state.omega) / config.inertia
    state.theta = float(wrap_angle(state.theta + state.omega * dt))
    state.omega = state.omega + alpha * dt
    state.contact_forces = forces


def tactile_readout(
    state: EnvState, config: EnvConfig, rng: Optional[np.random.Generator] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Read the tactile bank.

    Contact channels read their finger's force divided by the reading cap.
    Duplicates copy a contact channel plus Gaussian noise. Noise channels
    fire with their activation rate, reading U(0.5, 1) when firing, else 0.

    Args:
        state: Environment state
        config: Environment configuration
        rng: Stream for noisy channels (defaults to the state's stream)

    Returns:
        Tuple of (readings clipped to [0, 1], raw unclipped readings)
    """
    rng = state.rng if rng is None else rng
    cap = config.reading_cap
    raw = np.zeros(config.n_tactile)
    for i, sensor in enumerate(config.tactile):
        if sensor.kind == "contact":
            raw[i] = state.contact_forces[sensor.source] / cap
    for i, sensor in enumerate(config.tactile):
        if sensor.kind == "duplicate":
            raw[i] = raw[sensor.source] + sensor.noise_std * rng.standard_normal()
        elif sensor.kind == "noise":
            fired = rng.random() < sensor.activation_rate
            raw[i] = rng.uniform(NOISE_READING_LOW, 1.0) if fired else 0.0
    return np.clip(raw, 0.0, 1.0), raw


def observe(
    state: EnvState, config: EnvConfig, rng: Optional[np.random.Generator] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Build the normalized observation in schema order.

    Returns:
        Tuple of (observation in [-1, 1], raw tactile readings)
    """
    rng = state.rng if rng is None else rng
    tactile, raw_tactile = tactile_readout(state, config, rng)
    obs = np.concatenate(
        [
            state.servo.position / config.q_max,
            state.servo.velocity / config.joint_velocity_scale,
            state.contact_forces / config.reading_cap,
            [math.cos(state.theta), math.sin(state.theta), state.omega / config.omega_scale],
            [math.cos(state.target_theta), math.sin(state.target_theta)],
            tactile,
        ]
    )
    if config.obs_noise_std > 0:
        obs = obs + config.obs_noise_std * rng.standard_normal(obs.shape)
    return np.clip(obs, -1.0, 1.0), raw_tactile


def env_step(state: EnvState, action: np.ndarray, tracker: Optional[TrackingRecorder] = None) -> StepResult:
    """
    Apply one action for control_every substeps (the state is updated in place).

    Args:
        state: Environment state from env_reset
        action: Normalized finger commands, one per finger; clamped to [-1, 1]
        tracker: Optional tracking recorder, fed the servo positions after every substep

    Returns:
        StepResult with observation, reward, done, success and info
    """
    config = state.config
    if state.done:
        raise RuntimeError("Episode is done; call env_reset before stepping again")
    action = np.asarray(action, dtype=np.float64)
    if action.shape != (config.n_fingers,):
        raise ValueError(f"Expected {config.n_fingers} action components, got shape {action.shape}")
    action = np.clip(action, -1.0, 1.0)
    if config.act_noise_std > 0:
        action = np.clip(action + config.act_noise_std * state.rng.standard_normal(action.shape), -1.0, 1.0)
    command = action * config.q_max

    for _ in range(config.control_every):
        physics_substep(state, config, command)
        if tracker is not None:
            tracker.record(state.servo.position, command)

    state.elapsed_steps += 1
    angle_error = float(wrap_angle(state.target_theta - state.theta))
    success = abs(angle_error) < state.success_tol
    reward = -config.reward_error_coef * abs(angle_error) + (config.success_bonus if success else 0.0)
    done = state.elapsed_steps >= config.max_steps
    if success:
        state.goals_reached += 1
        if config.resample_on_success:
            state.target_theta = sample_goal(state.rng, state.theta, config.min_goal_separation)
        else:
            done = True
    state.done = done

    obs, raw_tactile = observe(state, config)
    return StepResult(
        observation=obs,
        reward=float(reward),
        done=done,
        success=success,
        info={"angle_error": angle_error, "raw_tactile": raw_tactile},
    )
