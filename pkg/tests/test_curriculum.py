import numpy as np
import pytest

from src.curriculum.ledger import (
    ImportanceLedger,
    importance_scores,
    merge_ledgers,
    record_activations,
    select_reduction,
)
from src.curriculum.plan import (
    CurriculumConfig,
    RewardEma,
    build_curriculum_plan,
    curriculum_preset,
    maybe_advance_curriculum,
    read_events,
    write_event,
    write_importance_snapshot,
)
from src.envs.config import get_env_config
from src.envs.schema import allegro_table1_schema
from src.utils.file_io import read_csv_rows


def filled_ledger(indices, rates, steps=100):
    ledger = ImportanceLedger(tuple(indices))
    ledger.activation_count = np.array([int(r * steps) for r in rates])
    ledger.steps_observed = steps
    return ledger


def test_record_activations_counts_readings_above_threshold():
    ledger = ImportanceLedger((0, 1, 2), activation_threshold=0.1)
    record_activations(ledger, np.array([0.5, 0.0, 0.2]))
    assert list(ledger.activation_count) == [1, 0, 1]
    record_activations(ledger, np.array([0.01, 0.02, 0.0]))
    assert list(ledger.activation_count) == [1, 0, 1]
    assert ledger.steps_observed == 2


def test_record_activations_rejects_length_mismatch():
    with pytest.raises(ValueError):
        record_activations(ImportanceLedger((0, 1)), np.zeros(3))


def test_importance_scores():
    ledger = ImportanceLedger((7, 8))
    ledger.activation_count = np.array([10, 5])
    ledger.steps_observed = 10
    indices, g = importance_scores(ledger)
    assert indices == (7, 8)
    assert list(g) == [1.0, 0.5]
    indices, g = importance_scores(ledger, exclude=[7])
    assert indices == (8,) and list(g) == [0.5]


def test_importance_scores_need_data():
    with pytest.raises(ValueError):
        importance_scores(ImportanceLedger((0,)))


def test_merged_ledgers_do_not_depend_on_split():
    rng = np.random.default_rng(0)
    readings = rng.uniform(0, 1, (40, 3))
    whole = record_activations(ImportanceLedger((0, 1, 2)), readings)
    parts = [record_activations(ImportanceLedger((0, 1, 2)), chunk) for chunk in np.array_split(readings, 4)]
    merged = merge_ledgers(parts)
    assert np.array_equal(merged.activation_count, whole.activation_count)
    assert merged.steps_observed == whole.steps_observed


def test_select_reduction_examples():
    assert set(select_reduction(np.array([5, 1, 3, 2, 9]), 2)) == {1, 3}
    assert select_reduction(np.array([2, 2, 5]), 1) == (0,)
    with pytest.raises(ValueError):
        select_reduction(np.array([1.0, 2.0]), 3)


def test_select_reduction_is_scale_invariant():
    g = np.random.default_rng(1).uniform(0, 1, 13)
    assert select_reduction(g, 7) == select_reduction(g * 37.5, 7)


def test_planted_rates_select_lowest_seven():
    rates = np.random.default_rng(2).permutation(np.linspace(0.05, 0.95, 13))
    selected = select_reduction(rates, 7)
    assert set(selected) == set(np.argsort(rates)[:7])


def test_presets():
    assert curriculum_preset("csr2").step_counts == [7, 6]
    assert curriculum_preset("csr3").step_counts == [4, 4, 3]
    assert curriculum_preset("aac").all_at_start
    with pytest.raises(ValueError):
        curriculum_preset("csr9")


def test_plan_rejects_too_many_features():
    schema = get_env_config("palm_spin").schema()
    with pytest.raises(ValueError):
        build_curriculum_plan(CurriculumConfig(step_counts=[10, 10]), schema)


def test_trigger_threshold_and_completion():
    schema = allegro_table1_schema()
    plan = build_curriculum_plan(CurriculumConfig(step_counts=[7, 6], trigger_threshold=2500, cooldown_epochs=50), schema)
    ledger = filled_ledger(plan.reducible, np.linspace(0.9, 0.1, 13))

    same, event = maybe_advance_curriculum(plan, ledger, 2400.0, 10)
    assert event is None and same is plan

    plan, event = maybe_advance_curriculum(plan, ledger, 2600.0, 10)
    assert event is not None and len(plan.mask) == 7
    assert ledger.steps_observed == 0

    ledger = filled_ledger(plan.reducible, np.linspace(0.9, 0.1, 13))
    blocked, event = maybe_advance_curriculum(plan, ledger, 2600.0, 30)
    assert event is None
    plan, event = maybe_advance_curriculum(plan, ledger, 2600.0, 60)
    assert event is not None and plan.complete

    done, event = maybe_advance_curriculum(plan, ledger, 1e9, 500)
    assert event is None and done is plan


def test_table_one_feature_count_trace():
    schema = allegro_table1_schema()
    plan = build_curriculum_plan(curriculum_preset("csr2", trigger_threshold=0.0, cooldown_epochs=0), schema)
    trace = [plan.active_feature_count()]
    for epoch in range(2):
        ledger = filled_ledger(plan.reducible, np.linspace(0.1, 0.9, 13))
        plan, _ = maybe_advance_curriculum(plan, ledger, 1.0, epoch)
        trace.append(plan.active_feature_count())
    assert trace == [75, 68, 62]


def test_reduction_follows_ascending_importance():
    schema = allegro_table1_schema()
    plan = build_curriculum_plan(curriculum_preset("csr2", trigger_threshold=0.0, cooldown_epochs=0), schema)
    rates = np.linspace(0.9, 0.3, 13)
    ledger = filled_ledger(plan.reducible, rates, steps=1000)
    plan, event = maybe_advance_curriculum(plan, ledger, 1.0, 0)
    assert event.reduced_indices == tuple(range(74, 67, -1))


def test_all_at_start_fires_without_reward_or_data():
    schema = get_env_config("palm_spin").schema()
    plan = build_curriculum_plan(curriculum_preset("aac"), schema)
    plan, event = maybe_advance_curriculum(plan, ImportanceLedger(plan.reducible), None, 0)
    assert event is not None
    assert plan.mask == tuple(schema.reducible_indices())


def test_partial_step_waits_for_ledger_data():
    schema = get_env_config("palm_spin").schema()
    plan = build_curriculum_plan(curriculum_preset("csr2", trigger_threshold=0.0), schema)
    same, event = maybe_advance_curriculum(plan, ImportanceLedger(plan.reducible), 10.0, 3)
    assert event is None and same is plan


def test_reward_ema_half_life():
    ema = RewardEma(half_life=1.0)
    assert ema.update([], 0) is None
    assert ema.update([10.0, 20.0], 1) == 15.0
    assert ema.update([5.0], 2) == pytest.approx(10.0)


def test_reward_ema_half_life_counts_epochs_without_episodes():
    ema = RewardEma(half_life=20.0)
    ema.update([0.0], 0)
    for epoch in range(1, 20):
        assert ema.update([], epoch) == 0.0
    assert ema.update([100.0], 20) == pytest.approx(50.0)

    stepwise = RewardEma(half_life=20.0)
    stepwise.update([0.0], 0)
    for epoch in range(1, 21):
        stepwise.update([100.0], epoch)
    assert stepwise.value == pytest.approx(50.0)
    assert ema.weight(20) == pytest.approx(0.5)


def test_event_log_and_snapshot(tmp_path):
    schema = get_env_config("palm_spin").schema()
    plan = build_curriculum_plan(curriculum_preset("csr2", trigger_threshold=0.0), schema)
    ledger = filled_ledger(plan.reducible, np.linspace(0.05, 0.65, 13))
    plan, event = maybe_advance_curriculum(plan, ledger, 1.0, 4)
    path = str(tmp_path / "events.jsonl")
    write_event(path, event)
    assert read_events(path) == [event]

    snapshot = write_importance_snapshot(str(tmp_path / "importance.csv"), schema, ledger, [event])
    rows = read_csv_rows(snapshot)
    assert len(rows) == 13
    reduced = [r for r in rows if r["reduced_at_step"] == "0"]
    assert len(reduced) == 7
    assert all(r["group"] == "tactile" for r in rows)
