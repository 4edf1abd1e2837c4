"""
Shared pytest configuration: project root on sys.path, --runslow and small fixtures.
"""

import os
import sys

import pytest

project_root = os.path.dirname(os.path.abspath(__file__))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.harness.config import experiment_preset  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full training suites")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full training runs, skipped unless --runslow is given")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


TINY_RUN = {
    "epochs": 3,
    "eval_every": 0,
    "eval_trials": 4,
    "marathon_trials": 1,
    "marathon_duration": 2.0,
    "hyper": {"n_envs": 4, "horizon": 16, "minibatch_size": 32, "update_epochs": 2},
    "network": {"actor_hidden": [16], "critic_hidden": [16]},
    "env_overrides": {"episode_length": 1.0},
}


@pytest.fixture
def tiny_experiment(tmp_path):
    """Factory for a fast experiment config writing into a temporary directory."""

    def make(preset: str = "full_obs", name: str = "run", **overrides):
        fields = {**TINY_RUN, **overrides, "output_dir": str(tmp_path / name)}
        return experiment_preset(preset, **fields)

    return make
