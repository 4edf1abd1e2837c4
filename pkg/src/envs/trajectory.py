"""
Per-control-step trajectory dumps for golden tests and importance replays.
"""

from typing import Dict, List

import numpy as np

from src.envs.palm_spin import EnvState, StepResult
from src.utils.file_io import read_csv_rows, write_csv_rows


class TrajectoryRecorder:
    """Collects one CSV row per control step."""

    def __init__(self, n_actions: int, n_tactile: int, tactile_start: int):
        self.n_actions = n_actions
        self.n_tactile = n_tactile
        self.tactile_start = tactile_start
        self.rows: List[Dict[str, object]] = []

    @property
    def fieldnames(self) -> List[str]:
        return (
            ["step", "theta", "omega", "target"]
            + [f"action_{i}" for i in range(self.n_actions)]
            + [f"tactile_{i}" for i in range(self.n_tactile)]
            + ["reward", "success"]
        )

    def record(self, state: EnvState, action: np.ndarray, result: StepResult) -> None:
        row: Dict[str, object] = {
            "step": state.elapsed_steps,
            "theta": repr(float(state.theta)),
            "omega": repr(float(state.omega)),
            "target": repr(float(state.target_theta)),
            "reward": repr(float(result.reward)),
            "success": int(result.success),
        }
        for i, a in enumerate(np.asarray(action, dtype=np.float64)):
            row[f"action_{i}"] = repr(float(a))
        tactile = result.observation[self.tactile_start:self.tactile_start + self.n_tactile]
        for i, value in enumerate(tactile):
            row[f"tactile_{i}"] = repr(float(value))
        self.rows.append(row)

    def write(self, path: str) -> str:
        return write_csv_rows(path, self.fieldnames, self.rows)


def read_tactile_columns(path: str) -> np.ndarray:
    """Load the tactile columns of a trajectory dump as a (steps, n_tactile) array."""
    rows = read_csv_rows(path)
    if not rows:
        return np.zeros((0, 0))
    columns = sorted((k for k in rows[0] if k.startswith("tactile_")), key=lambda k: int(k.split("_")[1]))
    return np.array([[float(row[c]) for c in columns] for row in rows])
