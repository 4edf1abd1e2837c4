import math

import numpy as np
import pytest

from src.envs.config import ServoSpec, get_env_config
from src.envs.servo import ServoState, actuator_track, hold_steps_for_rate, servo_tracking_rmse
from src.harness.protocols import servo_rate_sweep


def sine(t):
    return math.sin(math.pi * t)


def test_servo_never_exceeds_speed_limit_or_overshoots():
    spec = ServoSpec(v_max=2.0, gain=100.0)
    servo = ServoState.at_rest(2)
    command = np.array([1.0, -0.01])
    dt = 1.0 / 60.0
    for _ in range(60):
        new = actuator_track(servo, command, dt, spec)
        assert np.all(np.abs(new.position - servo.position) <= spec.v_max * dt + 1e-12)
        assert new.position[0] <= 1.0 and new.position[1] >= -0.01
        servo = new
    assert np.allclose(servo.position, command)


def test_acceleration_limit_restarts_on_new_command():
    spec = ServoSpec(v_max=4.0, gain=50.0, accel_max=60.0)
    dt = 1.0 / 60.0
    servo = actuator_track(ServoState.at_rest(1), np.array([1.0]), dt, spec)
    assert servo.velocity[0] == pytest.approx(1.0)
    servo = actuator_track(servo, np.array([1.0]), dt, spec)
    assert servo.velocity[0] == pytest.approx(2.0)
    servo = actuator_track(servo, np.array([0.9]), dt, spec)
    assert abs(servo.velocity[0]) == pytest.approx(1.0)


def test_full_rate_tracking_with_unlimited_servo_is_exact():
    spec = ServoSpec(v_max=1e9, gain=1e9)
    result = servo_tracking_rmse(spec, sine, 60.0, 60.0, 8.0)
    assert result["rmse"] == pytest.approx(0.0, abs=1e-9)
    assert result["hold_steps"] == 1


def test_rate_sweep_is_best_at_medium_rate():
    servo = get_env_config("rate_sweep_servo").servo
    rows = servo_rate_sweep(servo, [60.0, 12.0, 2.0], sim_rate=60.0, duration_s=8.0)
    fast, medium, slow = (row["mean_rmse"] for row in rows)
    assert medium < fast
    assert medium < slow


def test_single_rate_gives_one_row():
    rows = servo_rate_sweep(ServoSpec(), [30.0])
    assert len(rows) == 1
    assert rows[0]["hold_steps"] == 2


def test_hold_steps_validation():
    assert hold_steps_for_rate(60.0, 10.0) == 6
    with pytest.raises(ValueError):
        hold_steps_for_rate(60.0, 120.0)
    with pytest.raises(ValueError):
        hold_steps_for_rate(60.0, 7.0)
