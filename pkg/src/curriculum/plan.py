"""
Reduction plan, reward trigger and curriculum events.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.curriculum.ledger import ImportanceLedger, importance_scores, reset_ledger, select_reduction
from src.envs.schema import FeatureSchema
from src.utils.file_io import append_jsonl, read_jsonl, write_csv_rows

logger = logging.getLogger(__name__)


class CurriculumConfig(BaseModel):
    """How many features each step reduces and when steps fire."""

    model_config = ConfigDict(extra="forbid")

    step_counts: List[int] = Field(default_factory=list)
    all_at_start: bool = Field(False, description="One step reducing every reducible feature before training")
    trigger_threshold: float = 500.0
    reward_half_life: float = Field(20.0, gt=0, description="EMA half-life in epochs")
    cooldown_epochs: int = Field(50, ge=0)
    activation_threshold: float = Field(0.05, ge=0)


CURRICULUM_STEPS: Dict[str, List[int]] = {
    "csr3": [4, 4, 3],
    "csr2": [7, 6],
    "none": [],
}


def curriculum_preset(name: str, **overrides: Any) -> CurriculumConfig:
    """
    Named curricula: csr3 = [4, 4, 3], csr2 = [7, 6], aac = everything at once, none.
    """
    if name == "aac":
        base = CurriculumConfig(all_at_start=True)
    elif name in CURRICULUM_STEPS:
        base = CurriculumConfig(step_counts=list(CURRICULUM_STEPS[name]))
    else:
        raise ValueError(f"Unknown curriculum '{name}'. Valid curricula: {sorted(list(CURRICULUM_STEPS) + ['aac'])}")
    return base.model_copy(update=overrides)


@dataclass(frozen=True)
class CurriculumEvent:
    """One fired reduction step."""

    epoch: int
    step_index: int
    reduced_indices: Tuple[int, ...]
    reduced_names: Tuple[str, ...]
    importance: Dict[str, float]
    ema_reward: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epoch": self.epoch,
            "step_index": self.step_index,
            "reduced_indices": list(self.reduced_indices),
            "reduced_names": list(self.reduced_names),
            "importance": dict(self.importance),
            "ema_reward": self.ema_reward,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "CurriculumEvent":
        return cls(
            epoch=int(payload["epoch"]),
            step_index=int(payload["step_index"]),
            reduced_indices=tuple(payload["reduced_indices"]),
            reduced_names=tuple(payload["reduced_names"]),
            importance={k: float(v) for k, v in payload["importance"].items()},
            ema_reward=payload.get("ema_reward"),
        )


@dataclass(frozen=True)
class CurriculumPlan:
    """Step sizes, trigger rule and progression state."""

    step_counts: Tuple[int, ...]
    trigger_threshold: float
    reward_half_life: float
    cooldown_epochs: int
    all_at_start: bool
    reducible: Tuple[int, ...]
    feature_names: Tuple[str, ...]
    step_index: int = 0
    resolved: Tuple[Tuple[int, ...], ...] = ()
    last_trigger_epoch: Optional[int] = None

    @property
    def mask(self) -> Tuple[int, ...]:
        return tuple(sorted(i for step in self.resolved for i in step))

    @property
    def complete(self) -> bool:
        return self.step_index >= len(self.step_counts)

    def remaining(self) -> List[int]:
        reduced = set(self.mask)
        return [i for i in self.reducible if i not in reduced]

    def active_feature_count(self) -> int:
        return len(self.feature_names) - len(self.mask)


def build_curriculum_plan(config: CurriculumConfig, schema: FeatureSchema) -> CurriculumPlan:
    """
    Create an empty plan for a schema.

    Raises:
        ValueError: If the steps reduce more features than the schema can lose
    """
    reducible = tuple(schema.reducible_indices())
    counts = [len(reducible)] if config.all_at_start else list(config.step_counts)
    if any(c < 1 for c in counts):
        raise ValueError("Every curriculum step must reduce at least one feature")
    if sum(counts) > len(reducible):
        raise ValueError(f"Curriculum reduces {sum(counts)} features but schema '{schema.name}' has {len(reducible)} reducible")
    return CurriculumPlan(
        step_counts=tuple(counts),
        trigger_threshold=-math.inf if config.all_at_start else config.trigger_threshold,
        reward_half_life=config.reward_half_life,
        cooldown_epochs=config.cooldown_epochs,
        all_at_start=config.all_at_start,
        reducible=reducible,
        feature_names=tuple(schema.feature_names()),
    )


def maybe_advance_curriculum(
    plan: CurriculumPlan, ledger: ImportanceLedger, ema_reward: Optional[float], epoch: int
) -> Tuple[CurriculumPlan, Optional[CurriculumEvent]]:
    """
    Fire the next reduction step if the trigger conditions hold.

    A step fires when steps remain, the reward EMA exceeds the threshold and
    the cooldown since the previous step has elapsed. The least important
    remaining features are selected from the ledger, which is then reset.

    Args:
        plan: Current plan
        ledger: Importance ledger (reset in place when a step fires)
        ema_reward: Smoothed episode reward, None before any episode ended
        epoch: Current epoch

    Returns:
        Tuple of (new plan, event or None)
    """
    if plan.complete:
        return plan, None
    if not plan.all_at_start:
        if ema_reward is None or not ema_reward > plan.trigger_threshold:
            return plan, None
        if plan.last_trigger_epoch is not None and epoch - plan.last_trigger_epoch < plan.cooldown_epochs:
            return plan, None

    count = plan.step_counts[plan.step_index]
    remaining = plan.remaining()
    has_data = ledger.steps_observed > 0
    if has_data:
        indices, g = importance_scores(ledger, exclude=plan.mask)
    else:
        indices, g = tuple(remaining), np.zeros(len(remaining))
        if count < len(remaining):
            logger.warning("Curriculum step %d postponed: importance ledger is empty", plan.step_index)
            return plan, None
    selected = select_reduction(g, count, indices)

    rates = ledger.rates()
    importance = {plan.feature_names[idx]: float(rates[k]) for k, idx in enumerate(ledger.feature_indices)}
    event = CurriculumEvent(
        epoch=epoch,
        step_index=plan.step_index,
        reduced_indices=selected,
        reduced_names=tuple(plan.feature_names[i] for i in selected),
        importance=importance,
        ema_reward=None if ema_reward is None else float(ema_reward),
    )
    reset_ledger(ledger)
    logger.info(
        "Curriculum step %d fired at epoch %d: reduced %s", plan.step_index, epoch, ", ".join(event.reduced_names)
    )
    new_plan = replace(
        plan,
        step_index=plan.step_index + 1,
        resolved=plan.resolved + (selected,),
        last_trigger_epoch=epoch,
    )
    return new_plan, event


@dataclass
class RewardEma:
    """Exponential moving average of episode returns with a half-life in epochs."""

    half_life: float = 20.0
    value: Optional[float] = None
    last_epoch: Optional[int] = None

    def weight(self, elapsed_epochs: float = 1.0) -> float:
        """Weight of a new sample arriving elapsed_epochs after the previous one."""
        return 1.0 - 0.5 ** (elapsed_epochs / self.half_life)

    def update(self, episode_returns: Sequence[float], epoch: int) -> Optional[float]:
        """
        Fold in the mean return of the episodes that ended this epoch.

        Epochs without finished episodes keep the value; the next sample is
        weighted by the number of epochs since the previous one, so the
        half-life is measured in epochs however episodes line up with them.
        """
        if len(episode_returns) == 0:
            return self.value
        mean = float(np.mean(episode_returns))
        if self.value is None:
            self.value = mean
        else:
            self.value += self.weight(epoch - self.last_epoch) * (mean - self.value)
        self.last_epoch = epoch
        return self.value


def write_event(path: str, event: CurriculumEvent) -> None:
    append_jsonl(path, event.to_dict())


def read_events(path: str) -> List[CurriculumEvent]:
    return [CurriculumEvent.from_dict(record) for record in read_jsonl(path)]


def write_importance_snapshot(
    path: str, schema: FeatureSchema, ledger: ImportanceLedger, events: Sequence[CurriculumEvent]
) -> str:
    """
    Dump feature name, group, activation rate and reduced-at-step for every reducible feature.

    A reduced feature reports the rate recorded in the event that removed it;
    the others report the ledger's current rate.
    """
    names = schema.feature_names()
    reduced_at: Dict[int, Tuple[int, float]] = {}
    for event in events:
        for idx in event.reduced_indices:
            reduced_at[idx] = (event.step_index, event.importance.get(names[idx], float("nan")))
    rates = ledger.rates()
    rows = []
    for k, idx in enumerate(ledger.feature_indices):
        step, rate = reduced_at.get(idx, ("", float(rates[k])))
        rows.append(
            {
                "feature": names[idx],
                "group": schema.group_of(idx),
                "activation_rate": repr(float(rate)),
                "reduced_at_step": step,
            }
        )
    return write_csv_rows(path, ["feature", "group", "activation_rate", "reduced_at_step"], rows)
