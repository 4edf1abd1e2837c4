import math

import numpy as np
import pytest

from src.nn.optim import adam_init, adam_step, clip_grad_norm, global_norm
from src.nn.policy import (
    LOG_STD_MAX,
    LOG_STD_MIN,
    build_policy_head,
    gaussian_entropy,
    gaussian_logprob,
    gaussian_logprob_grads,
    gaussian_policy_sample,
    policy_forward,
)
from src.utils.errors import NonFiniteError
from src.utils.seeding import make_rng


def test_logprob_of_standard_normal_at_mean():
    logp = gaussian_logprob(np.zeros(1), np.zeros(1), np.zeros(1))
    assert logp == pytest.approx(-0.5 * math.log(2 * math.pi))


def test_logprob_sums_over_action_dimensions():
    mean = np.array([0.1, -0.2])
    log_std = np.array([-0.3, 0.4])
    action = np.array([0.5, 0.0])
    expected = sum(
        -0.5 * ((a - m) / math.exp(s)) ** 2 - s - 0.5 * math.log(2 * math.pi)
        for m, s, a in zip(mean, log_std, action)
    )
    assert gaussian_logprob(mean, log_std, action) == pytest.approx(expected)


def test_logprob_batch_shape():
    out = gaussian_logprob(np.zeros((5, 3)), np.zeros(3), np.ones((5, 3)))
    assert out.shape == (5,)


def test_logprob_grads_match_finite_differences():
    rng = make_rng(0)
    mean = rng.standard_normal(3)
    log_std = 0.3 * rng.standard_normal(3)
    action = rng.standard_normal(3)
    d_mean, d_log_std = gaussian_logprob_grads(mean, log_std, action)
    eps = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = eps
        num_mean = (gaussian_logprob(mean + e, log_std, action) - gaussian_logprob(mean - e, log_std, action)) / (2 * eps)
        num_std = (gaussian_logprob(mean, log_std + e, action) - gaussian_logprob(mean, log_std - e, action)) / (2 * eps)
        assert d_mean[j] == pytest.approx(num_mean, rel=1e-5, abs=1e-7)
        assert d_log_std[j] == pytest.approx(num_std, rel=1e-5, abs=1e-7)


def test_sample_logprob_is_consistent():
    rng = make_rng(1)
    mean = np.array([0.2, -0.1, 0.0])
    log_std = np.full(3, -0.5)
    action, logp = gaussian_policy_sample(mean, log_std, rng)
    assert logp == pytest.approx(gaussian_logprob(mean, log_std, action))


def test_entropy_of_unit_gaussian():
    assert gaussian_entropy(np.zeros(2)) == pytest.approx(2 * 0.5 * (math.log(2 * math.pi) + 1))


def test_policy_head_clamps_log_std_and_starts_near_zero():
    head = build_policy_head(10, 3, [16, 16], make_rng(2), init_log_std=10.0)
    assert np.all(head.log_std == LOG_STD_MAX)
    mean, _, _ = policy_forward(head, make_rng(3).uniform(-1, 1, 10))
    assert np.max(np.abs(mean)) < 0.1
    head = build_policy_head(10, 3, [16], make_rng(2), init_log_std=-50.0)
    assert np.all(head.log_std == LOG_STD_MIN)


def test_adam_first_step_moves_by_learning_rate():
    params = [np.array([1.0, -2.0])]
    grads = [np.array([0.5, -3.0])]
    state = adam_init(params, lr=0.1)
    new_params, new_state = adam_step(params, grads, state)
    assert np.allclose(new_params[0], [0.9, -1.9], atol=1e-6)
    assert new_state.step_count == 1
    assert np.array_equal(params[0], [1.0, -2.0])


def test_adam_minimizes_quadratic():
    params = [np.array([3.0, -4.0])]
    state = adam_init(params, lr=0.1)
    for _ in range(500):
        params, state = adam_step(params, [2.0 * params[0]], state)
    assert np.linalg.norm(params[0]) < 0.05


def test_adam_rejects_non_finite_gradient():
    params = [np.zeros(2)]
    with pytest.raises(NonFiniteError):
        adam_step(params, [np.array([np.nan, 0.0])], adam_init(params))


def test_clip_grad_norm():
    grads = [np.array([3.0]), np.array([4.0])]
    clipped, norm = clip_grad_norm(grads, 1.0)
    assert norm == pytest.approx(5.0)
    assert global_norm(clipped) == pytest.approx(1.0)
    unchanged, _ = clip_grad_norm(grads, 10.0)
    assert np.array_equal(unchanged[0], grads[0])


def test_sampling_is_seeded():
    mean = np.array([0.3, -0.4])
    log_std = np.array([-1.0, 0.0])
    first = gaussian_policy_sample(mean, log_std, make_rng(9))
    second = gaussian_policy_sample(mean, log_std, make_rng(9))
    assert np.array_equal(first[0], second[0])
    assert first[1] == second[1]


def test_sampling_at_minimum_log_std_stays_at_mean():
    mean = np.array([0.25])
    log_std = np.array([LOG_STD_MIN])
    rng = make_rng(10)
    offsets = np.array([abs(gaussian_policy_sample(mean, log_std, rng)[0][0] - 0.25) for _ in range(1000)])
    assert np.median(offsets) < 1e-2
    assert np.max(offsets) < 6.0 * math.exp(LOG_STD_MIN)


def test_sampling_moments():
    mean = np.array([0.5, -1.0])
    log_std = np.array([math.log(0.3), math.log(2.0)])
    rng = make_rng(11)
    samples = np.array([gaussian_policy_sample(mean, log_std, rng)[0] for _ in range(100_000)])
    assert np.allclose(samples.mean(axis=0), mean, rtol=0.02, atol=0.01)
    assert np.allclose(samples.std(axis=0), np.exp(log_std), rtol=0.02)


def test_adam_zero_gradient_keeps_parameters():
    params = [np.array([1.5, -0.5]), np.array([[2.0]])]
    state = adam_init(params)
    for _ in range(3):
        params, state = adam_step(params, [np.zeros(2), np.zeros((1, 1))], state)
    assert np.array_equal(params[0], [1.5, -0.5])
    assert np.array_equal(params[1], [[2.0]])


def test_adam_without_momentum_is_sign_step():
    params = [np.array([1.0, 1.0, 1.0])]
    g = np.array([0.2, -5.0, 1e-3])
    state = adam_init(params, lr=0.05, beta1=0.0, beta2=0.0)
    new_params, _ = adam_step(params, [g], state)
    assert np.allclose(new_params[0], 1.0 - 0.05 * g / (np.abs(g) + 1e-8), rtol=0, atol=1e-15)


def test_adam_matches_hand_iteration_on_quadratic():
    lr, b1, b2, eps = 0.1, 0.9, 0.999, 1e-8
    x, m, v = 1.0, 0.0, 0.0
    table = []
    for t in range(1, 4):
        g = 2.0 * x
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        x = x - lr * (m / (1 - b1**t)) / (math.sqrt(v / (1 - b2**t)) + eps)
        table.append(x)
    assert table[0] == pytest.approx(0.9, abs=1e-7)
    assert table[1] == pytest.approx(0.8004122, abs=1e-6)

    params = [np.array([1.0])]
    state = adam_init(params, lr=lr)
    for expected in table:
        params, state = adam_step(params, [2.0 * params[0]], state)
        assert params[0][0] == pytest.approx(expected, rel=1e-12)
