import numpy as np
import pytest

from src.drg.generator import (
    DrgConfig,
    DrgState,
    apply_drg,
    epoch_reinit,
    eval_view,
    extend_mask,
    init_random_layer,
    initial_state,
    sample_replacement,
)
from src.utils.seeding import make_rng


def test_zero_sigma_replacement_equals_delta():
    values = sample_replacement(5, 0.3, 0.0, make_rng(0))
    assert np.all(values == 0.3)


def test_replacement_moments():
    values = sample_replacement(100000, 0.0, 1.0, make_rng(1))
    assert abs(np.mean(values)) < 0.01
    assert abs(np.std(values) - 1.0) < 0.01


def test_zeros_mode_ignores_distribution():
    values = sample_replacement(4, 5.0, 2.0, make_rng(2), zeros_mode=True, batch=3)
    assert values.shape == (3, 4)
    assert np.all(values == 0.0)


def test_random_layer_alpha_one_is_identity():
    rng = make_rng(3)
    assert all(init_random_layer(10, 1.0, rng) is None for _ in range(100))


def test_random_layer_entry_std():
    rng = make_rng(4)
    draws = np.concatenate([init_random_layer(75, 0.0, rng).ravel() for _ in range(180)])
    assert abs(np.std(draws) / np.sqrt(1.0 / 75) - 1.0) < 0.02


def test_identity_frequency_matches_alpha():
    rng = make_rng(5)
    hits = sum(init_random_layer(4, 0.5, rng) is None for _ in range(10000))
    assert abs(hits / 10000 - 0.5) < 0.02


def test_inactive_state_is_bitwise_identity():
    obs = make_rng(6).uniform(-1, 1, 12)
    state = initial_state(12, DrgConfig())
    assert apply_drg(obs, state, DrgConfig(), make_rng(7)) is obs


def test_active_identity_with_empty_mask_returns_input_values():
    config = DrgConfig(alpha=1.0, active_from_start=True)
    state = epoch_reinit(initial_state(8, config), config, 0, make_rng(8))
    obs = make_rng(9).uniform(-1, 1, (4, 8))
    assert np.array_equal(apply_drg(obs, state, config, make_rng(10)), obs)


def test_apply_matches_replace_then_multiply():
    rng = make_rng(11)
    n = 9
    config = DrgConfig(delta=0.2, sigma=0.7, alpha=0.0)
    state = extend_mask(initial_state(n, config), [2, 5, 7], range(n))
    state = epoch_reinit(state, config, 0, rng)
    assert not state.phi_is_identity
    obs = rng.uniform(-1, 1, n)
    out = apply_drg(obs, state, config, make_rng(12))

    replacement = config.delta + config.sigma * make_rng(12).standard_normal(3)
    expected_input = obs.copy()
    expected_input[[2, 5, 7]] = replacement
    expected = state.phi_matrix() @ expected_input
    assert np.max(np.abs(out - expected)) < 1e-12


def test_epoch_reinit_draws_fresh_layer():
    config = DrgConfig(alpha=0.0)
    state = extend_mask(initial_state(6, config), [0], range(6))
    rng = make_rng(13)
    first = epoch_reinit(state, config, 0, rng)
    second = epoch_reinit(first, config, 1, rng)
    assert np.max(np.abs(first.phi - second.phi)) > 0
    assert second.epoch_of_phi == 1
    assert second.mask == (0,)


def test_epoch_reinit_is_reproducible():
    config = DrgConfig(alpha=0.3)
    state = extend_mask(initial_state(5, config), [1], range(5))
    runs = []
    for _ in range(2):
        rng = make_rng(14)
        s = state
        phis = []
        for epoch in range(20):
            s = epoch_reinit(s, config, epoch, rng)
            phis.append(s.phi_matrix())
        runs.append(phis)
    assert all(np.array_equal(a, b) for a, b in zip(*runs))


def test_inactive_state_ignores_reinit():
    config = DrgConfig(alpha=0.0)
    state = initial_state(4, config)
    assert epoch_reinit(state, config, 3, make_rng(15)) is state


def test_zeros_mode_keeps_identity_layer():
    config = DrgConfig(alpha=0.0, zeros_mode=True)
    state = extend_mask(initial_state(4, config), [3], range(4))
    state = epoch_reinit(state, config, 0, make_rng(16))
    assert state.phi_is_identity
    out = apply_drg(np.ones(4), state, config, make_rng(17))
    assert np.array_equal(out, [1.0, 1.0, 1.0, 0.0])


def test_xavier_layer_preserves_variance():
    rng = make_rng(18)
    n = 50
    config = DrgConfig(alpha=0.0, sigma=1.0)
    state = extend_mask(initial_state(n, config), [], range(n))
    variances = []
    for epoch in range(1000):
        state = epoch_reinit(state, config, epoch, rng)
        x = rng.standard_normal((20, n))
        variances.append(np.mean(apply_drg(x, state, config, rng) ** 2))
    assert abs(np.mean(variances) - 1.0) < 0.1


def test_masked_slots_are_independent_of_true_values():
    rng = make_rng(19)
    n = 6
    config = DrgConfig(alpha=1.0)
    state = extend_mask(initial_state(n, config), [4, 5], range(n))
    truth = rng.uniform(-1, 1, (10000, n))
    out = apply_drg(truth, state, config, make_rng(20))
    assert abs(np.corrcoef(truth[:, 4], out[:, 4])[0, 1]) < 0.05


def test_extend_mask_rejects_non_reducible_index():
    state = initial_state(5, DrgConfig())
    with pytest.raises(ValueError):
        extend_mask(state, [0], [3, 4])


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        apply_drg(np.zeros(4), initial_state(5, DrgConfig()), DrgConfig(), make_rng(0))


def test_eval_view_modes():
    config = DrgConfig(alpha=0.0)
    state = epoch_reinit(extend_mask(initial_state(3, config), [1], range(3)), config, 0, make_rng(21))
    assert eval_view(state, config).phi_is_identity
    sampled = DrgConfig(alpha=0.0, eval_mode="sampled_layer")
    assert eval_view(state, sampled) is state


def test_state_round_trip():
    config = DrgConfig(alpha=0.0)
    state = epoch_reinit(extend_mask(initial_state(4, config), [2, 3], range(4)), config, 7, make_rng(22))
    restored = DrgState.from_dict(state.to_dict())
    assert restored.mask == state.mask
    assert np.array_equal(restored.phi, state.phi)
    assert restored.epoch_of_phi == 7 and restored.active
