"""
Hand-written controllers used as evaluation oracles.
"""

import math

import numpy as np

from src.envs.config import EnvConfig
from src.envs.palm_spin import wrap_angle


class ScriptedController:
    """
    Velocity-tracking angle controller that reads only the observation.

    The desired spin rate is proportional to the wrapped angle error; every
    finger whose push direction reduces the rate error extends past the
    contact point in proportion to that error, the others rest at zero.
    """

    def __init__(self, config: EnvConfig, angle_gain: float = 4.0, max_rate: float = 3.0, push_gain: float = 0.3):
        self.config = config
        self.schema = config.schema()
        self.angle_gain = angle_gain
        self.max_rate = max_rate
        self.push_gain = push_gain
        self.directions = np.asarray(config.directions)

    def act(self, obs: np.ndarray) -> np.ndarray:
        obj = obs[self.schema.slice("object")]
        target = obs[self.schema.slice("target")]
        theta = math.atan2(obj[1], obj[0])
        omega = obj[2] * self.config.omega_scale
        goal = math.atan2(target[1], target[0])
        error = wrap_angle(goal - theta)
        rate_error = float(np.clip(self.angle_gain * error, -self.max_rate, self.max_rate)) - omega

        positions = np.zeros(self.config.n_fingers)
        push = self.directions * rate_error > 0
        positions[push] = self.config.q_contact + self.push_gain * abs(rate_error)
        return np.clip(positions / self.config.q_max, -1.0, 1.0)


class ZeroPolicy:
    """Holds every finger at rest."""

    def __init__(self, n_fingers: int):
        self.n_fingers = n_fingers

    def act(self, obs: np.ndarray) -> np.ndarray:
        return np.zeros(self.n_fingers)
