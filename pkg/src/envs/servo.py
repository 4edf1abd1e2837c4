"""
Rate-limited goal-seeking servo model and its tracking oracle.
"""

from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from src.envs.config import ServoSpec


@dataclass
class ServoState:
    """Per-joint position, velocity and the command currently being tracked."""

    position: np.ndarray
    velocity: np.ndarray
    last_command: np.ndarray

    @classmethod
    def at_rest(cls, n_joints: int, position: float = 0.0) -> "ServoState":
        pos = np.full(n_joints, float(position))
        return cls(position=pos, velocity=np.zeros(n_joints), last_command=pos.copy())

    def copy(self) -> "ServoState":
        return ServoState(self.position.copy(), self.velocity.copy(), self.last_command.copy())


def actuator_track(servo: ServoState, command: np.ndarray, dt: float, spec: ServoSpec) -> ServoState:
    """
    Move each joint toward its command for one time step.

    Speed is gain * error clipped to v_max, so |dq| <= v_max * dt, and a joint
    never overshoots its command. With accel_max set, a changed command
    restarts the joint's motion from rest and speed ramps up at accel_max.

    Args:
        servo: Current servo state
        command: Target positions (rad)
        dt: Step length (s)
        spec: Servo limits

    Returns:
        New servo state
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    command = np.asarray(command, dtype=np.float64)
    error = command - servo.position
    desired = np.clip(spec.gain * error, -spec.v_max, spec.v_max)

    if spec.accel_max is None:
        speed = desired
    else:
        fresh = command != servo.last_command
        start = np.where(fresh, 0.0, servo.velocity)
        step = spec.accel_max * dt
        speed = start + np.clip(desired - start, -step, step)

    delta = speed * dt
    arrived = np.abs(delta) >= np.abs(error)
    delta = np.where(arrived, error, delta)
    position = np.where(arrived, command, servo.position + delta)
    return ServoState(position=position, velocity=delta / dt, last_command=command.copy())


def servo_tracking_rmse(
    spec: ServoSpec,
    reference: Callable[[float], float],
    sim_rate: float,
    command_rate: float,
    duration: float,
) -> Dict[str, float]:
    """
    Track a reference signal sampled and held at command_rate.

    The servo is simulated at sim_rate; after each simulation step the
    actual position is compared with the reference at the start of that step.

    Args:
        spec: Servo limits
        reference: Reference position as a function of time (rad)
        sim_rate: Simulation frequency (Hz)
        command_rate: Command frequency (Hz); must divide sim_rate
        duration: Simulated time (s)

    Returns:
        Dictionary with 'rmse', 'hold_steps' and 'n_steps'
    """
    hold = hold_steps_for_rate(sim_rate, command_rate)
    dt = 1.0 / sim_rate
    n_steps = int(round(duration * sim_rate))
    servo = ServoState.at_rest(1, position=reference(0.0))
    command = np.array([reference(0.0)])
    sq_err = 0.0
    for k in range(n_steps):
        t = k * dt
        if k % hold == 0:
            command = np.array([reference(t)])
        servo = actuator_track(servo, command, dt, spec)
        err = servo.position[0] - reference(t)
        sq_err += err * err
    return {"rmse": float(np.sqrt(sq_err / max(n_steps, 1))), "hold_steps": hold, "n_steps": n_steps}


def hold_steps_for_rate(sim_rate: float, command_rate: float) -> int:
    """
    Number of simulation steps each command is held.

    Raises:
        ValueError: If the rate exceeds the simulation rate or does not divide it
    """
    if command_rate <= 0:
        raise ValueError("Command rate must be positive")
    if command_rate > sim_rate + 1e-9:
        raise ValueError(f"Command rate {command_rate} Hz exceeds the simulation rate {sim_rate} Hz")
    ratio = sim_rate / command_rate
    hold = int(round(ratio))
    if abs(ratio - hold) > 1e-9:
        raise ValueError(f"Command rate {command_rate} Hz does not divide the simulation rate {sim_rate} Hz")
    return hold
