import numpy as np
import pytest

from src.rl.gae import compute_gae, normalize_advantages


def test_single_terminal_step():
    adv, ret = compute_gae(np.array([1.0]), np.array([0.0, 5.0]), np.array([1.0]), 0.99, 0.95, normalize=False)
    assert adv[0] == pytest.approx(1.0)
    assert ret[0] == pytest.approx(1.0)


def test_two_step_discounted_sum():
    adv, _ = compute_gae(np.array([1.0, 1.0]), np.zeros(3), np.array([0.0, 1.0]), 0.5, 1.0, normalize=False)
    assert np.allclose(adv, [1.5, 1.0])


def test_lambda_zero_is_one_step_td():
    rng = np.random.default_rng(0)
    rewards = rng.standard_normal((6, 3))
    values = rng.standard_normal((7, 3))
    dones = np.zeros((6, 3))
    adv, _ = compute_gae(rewards, values, dones, 0.9, 0.0, normalize=False)
    assert np.allclose(adv, rewards + 0.9 * values[1:] - values[:-1])


def test_done_cuts_bootstrap():
    adv, _ = compute_gae(np.array([0.0, 0.0]), np.array([0.0, 0.0, 100.0]), np.array([0.0, 1.0]), 0.9, 0.9, normalize=False)
    assert np.allclose(adv, 0.0)


def test_returns_are_raw_advantages_plus_values():
    rng = np.random.default_rng(1)
    rewards = rng.standard_normal((5, 2))
    values = rng.standard_normal((6, 2))
    dones = (rng.uniform(size=(5, 2)) < 0.3).astype(float)
    raw, ret = compute_gae(rewards, values, dones, 0.99, 0.95, normalize=False)
    _, ret_normalized = compute_gae(rewards, values, dones, 0.99, 0.95)
    assert np.allclose(ret, raw + values[:-1])
    assert np.array_equal(ret, ret_normalized)


def test_normalization():
    adv = normalize_advantages(np.random.default_rng(2).normal(3.0, 5.0, 1000))
    assert abs(np.mean(adv)) < 1e-6
    assert abs(np.std(adv) - 1.0) < 1e-6


def test_length_mismatch():
    with pytest.raises(ValueError):
        compute_gae(np.zeros(3), np.zeros(3), np.zeros(3), 0.99, 0.95)
    with pytest.raises(ValueError):
        compute_gae(np.zeros(3), np.zeros(4), np.zeros(2), 0.99, 0.95)
