"""
Training loop and the session object that owns all mutable training state.

One epoch is: curriculum pre-step (only for all-at-start curricula), DRG
layer redraw, rollout collection, advantage estimation, policy update,
reward EMA update and the curriculum trigger check.
"""

import logging
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from src.curriculum.ledger import ImportanceLedger
from src.curriculum.plan import (
    CurriculumEvent,
    CurriculumPlan,
    RewardEma,
    build_curriculum_plan,
    maybe_advance_curriculum,
    write_event,
    write_importance_snapshot,
)
from src.drg.generator import DrgState, epoch_reinit, extend_mask, initial_state
from src.envs.config import EnvConfig
from src.envs.schema import FeatureSchema, get_schema
from src.harness.checkpoint import Checkpoint, save_checkpoint
from src.harness.config import ExperimentConfig
from src.harness.protocols import consecutive_success
from src.harness.trials import TrialSet, generate_trial_set
from src.nn.optim import AdamState
from src.rl.actor_critic import ActorCritic, build_actor_critic
from src.rl.evaluate import DeterministicActor, EvalReport, evaluate_policy
from src.rl.gae import compute_gae
from src.rl.ppo import LossReport, make_optimizer, ppo_update
from src.rl.rollout import EnvPool, collect_rollouts
from src.utils.file_io import append_csv_row, write_json
from src.utils.seeding import STREAM_DRG_LAYER, STREAM_LEARNER, STREAM_NETWORK, make_rng

logger = logging.getLogger(__name__)

METRICS_FIELDS = [
    "epoch",
    "mean_episode_reward",
    "eval_success_rate",
    "active_feature_count",
    "curriculum_step",
    "actor_loss",
    "critic_loss",
    "wall_ms",
]

METRICS_FILE = "metrics.csv"
EVENTS_FILE = "events.jsonl"
CHECKPOINT_FILE = "checkpoint.json"
CONFIG_FILE = "config.json"
TRIALS_FILE = "trials.json"
IMPORTANCE_FILE = "importance.csv"
REPORT_FILE = "report.json"


@dataclass
class RunReport:
    """Paths and headline numbers of one finished run."""

    run_dir: str
    metrics_path: str
    events_path: str
    checkpoint_path: str
    config_path: str
    trial_set_path: str
    importance_path: str
    seed: int
    preset: str
    epochs: int
    final_success_rate: float
    trial_set_hash: str
    marathon_mean: Optional[float]
    marathon_counts: List[int] = field(default_factory=list)
    n_events: int = 0
    feature_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "RunReport":
        return cls(**payload)


def format_float(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


@dataclass
class TrainingSession:
    """
    Mutable state carried between epochs.

    The environment pool, the learner stream and the DRG layer stream are
    all derived from the experiment seed, so a session is fully determined
    by its config.
    """

    config: ExperimentConfig
    env_config: EnvConfig
    schema: FeatureSchema
    ac: ActorCritic
    optimizer: AdamState
    pool: EnvPool
    drg_state: DrgState
    plan: CurriculumPlan
    ledger: ImportanceLedger
    ema: RewardEma
    trial_set: TrialSet
    learner_rng: Any
    drg_layer_rng: Any
    epoch: int = 0
    events: List[CurriculumEvent] = field(default_factory=list)
    last_eval: Optional[EvalReport] = None
    last_loss: Optional[LossReport] = None

    @classmethod
    def create(cls, config: ExperimentConfig) -> "TrainingSession":
        """
        Build a fresh session.

        Raises:
            ValueError: If the environment layout does not fit the configured schema preset
        """
        env_config = config.env_config()
        schema = env_config.schema()
        if config.schema_preset is not None:
            reference = get_schema(config.schema_preset)
            if reference.total_length != schema.total_length:
                raise ValueError(
                    f"Environment '{env_config.name}' has {schema.total_length} features, "
                    f"schema preset '{reference.name}' has {reference.total_length}"
                )
        n = schema.total_length
        ac = build_actor_critic(n, env_config.n_fingers, config.network, make_rng(config.seed, STREAM_NETWORK))
        plan = build_curriculum_plan(config.curriculum, schema)
        if config.trial_set_path:
            trial_set = TrialSet.load(config.trial_set_path)
        else:
            trial_set = generate_trial_set(config.eval_trials, config.trial_set_seed, env_config)
        return cls(
            config=config,
            env_config=env_config,
            schema=schema,
            ac=ac,
            optimizer=make_optimizer(ac, config.hyper),
            pool=EnvPool.create(env_config, config.hyper.n_envs, config.seed),
            drg_state=initial_state(n, config.drg),
            plan=plan,
            ledger=ImportanceLedger(plan.reducible, activation_threshold=config.curriculum.activation_threshold),
            ema=RewardEma(half_life=config.curriculum.reward_half_life),
            trial_set=trial_set,
            learner_rng=make_rng(config.seed, STREAM_LEARNER),
            drg_layer_rng=make_rng(config.seed, STREAM_DRG_LAYER),
        )

    @property
    def active_feature_count(self) -> int:
        return self.schema.total_length - len(self.drg_state.mask)

    def advance_curriculum(self, epoch: int) -> Optional[CurriculumEvent]:
        """Fire the next reduction step if due and extend the DRG mask with it."""
        self.plan, event = maybe_advance_curriculum(self.plan, self.ledger, self.ema.value, epoch)
        if event is not None:
            self.drg_state = extend_mask(self.drg_state, event.reduced_indices, self.plan.reducible)
            self.events.append(event)
        return event

    def run_epoch(self) -> Optional[CurriculumEvent]:
        """Run one collect-then-update iteration; returns the curriculum event it produced, if any."""
        epoch = self.epoch
        event = None
        if epoch == 0 and self.plan.all_at_start:
            event = self.advance_curriculum(epoch)
        if self.config.use_drg:
            self.drg_state = epoch_reinit(self.drg_state, self.config.drg, epoch, self.drg_layer_rng)

        hyper = self.config.hyper
        batch, stats = collect_rollouts(
            self.ac, self.pool, self.drg_state, self.config.drg, hyper.horizon, ledger=self.ledger
        )
        batch.advantages, batch.returns = compute_gae(
            batch.rewards, batch.values, batch.dones, hyper.gamma, hyper.gae_lambda
        )
        self.ac, self.optimizer, self.last_loss = ppo_update(
            self.ac, batch, hyper, self.optimizer, self.learner_rng, epoch=epoch
        )
        self.ema.update(stats.episode_returns, epoch)
        if not self.plan.all_at_start:
            event = self.advance_curriculum(epoch)
        self.epoch += 1
        return event

    def actor(self) -> DeterministicActor:
        return DeterministicActor(self.ac, self.drg_state, self.config.drg)

    def evaluate(self) -> EvalReport:
        self.last_eval = evaluate_policy(self.actor(), self.env_config, self.trial_set)
        return self.last_eval

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            ac=self.ac,
            drg_state=self.drg_state,
            drg_config=self.config.drg,
            env_config=self.env_config,
            epoch=self.epoch,
            seed=self.config.seed,
            experiment=self.config.model_dump(mode="json"),
        )

    def metrics_row(self, epoch: int, wall_ms: float) -> Dict[str, Any]:
        loss = self.last_loss
        return {
            "epoch": epoch,
            "mean_episode_reward": format_float(self.ema.value),
            "eval_success_rate": format_float(self.last_eval.success_rate if self.last_eval else None),
            "active_feature_count": self.active_feature_count,
            "curriculum_step": self.plan.step_index,
            "actor_loss": format_float(loss.actor_loss if loss else None),
            "critic_loss": format_float(loss.critic_loss if loss else None),
            "wall_ms": int(round(wall_ms)) if self.config.record_wall_time else 0,
        }


def _prepare_run_dir(run_dir: str) -> None:
    os.makedirs(run_dir, exist_ok=True)
    metrics = os.path.join(run_dir, METRICS_FILE)
    if os.path.exists(metrics):
        os.remove(metrics)
    open(os.path.join(run_dir, EVENTS_FILE), "w", encoding="utf-8").close()


def run_training(config: ExperimentConfig) -> RunReport:
    """
    Train one configuration and write every artifact into its run directory.

    Artifacts: config snapshot, trial set, per-epoch metrics CSV, curriculum
    event log, importance snapshot, checkpoint and the run report.

    Args:
        config: Experiment configuration

    Returns:
        RunReport

    Raises:
        ValueError: Invalid configuration
        TrainingDivergedError: Non-finite loss during an update
    """
    run_dir = config.run_dir()
    _prepare_run_dir(run_dir)
    paths = {name: os.path.join(run_dir, name) for name in (
        METRICS_FILE, EVENTS_FILE, CHECKPOINT_FILE, CONFIG_FILE, TRIALS_FILE, IMPORTANCE_FILE, REPORT_FILE
    )}
    session = TrainingSession.create(config)
    write_json(paths[CONFIG_FILE], config.model_dump(mode="json"))
    session.trial_set.save(paths[TRIALS_FILE])
    logger.info(
        "Training %s (seed %d) for %d epochs on %s with %d features; output in %s",
        config.preset, config.seed, config.epochs, session.env_config.name, session.schema.total_length, run_dir,
    )

    for epoch in range(config.epochs):
        started = time.perf_counter()
        n_before = len(session.events)
        session.run_epoch()
        for event in session.events[n_before:]:
            write_event(paths[EVENTS_FILE], event)
        last = epoch == config.epochs - 1
        if last or (config.eval_every and (epoch + 1) % config.eval_every == 0):
            report = session.evaluate()
            logger.info("Epoch %d: eval success %.2f, reward EMA %s", epoch, report.success_rate, session.ema.value)
        wall_ms = (time.perf_counter() - started) * 1000.0
        append_csv_row(paths[METRICS_FILE], METRICS_FIELDS, session.metrics_row(epoch, wall_ms))

    save_checkpoint(paths[CHECKPOINT_FILE], session.checkpoint())
    write_importance_snapshot(paths[IMPORTANCE_FILE], session.schema, session.ledger, session.events)

    marathon = None
    if config.marathon_trials > 0:
        seeds = [trial.seed for trial in session.trial_set.trials[: config.marathon_trials]]
        marathon = consecutive_success(session.actor(), session.env_config, seeds, config.marathon_duration)

    report = RunReport(
        run_dir=run_dir,
        metrics_path=paths[METRICS_FILE],
        events_path=paths[EVENTS_FILE],
        checkpoint_path=paths[CHECKPOINT_FILE],
        config_path=paths[CONFIG_FILE],
        trial_set_path=paths[TRIALS_FILE],
        importance_path=paths[IMPORTANCE_FILE],
        seed=config.seed,
        preset=config.preset,
        epochs=config.epochs,
        final_success_rate=session.last_eval.success_rate,
        trial_set_hash=session.trial_set.content_hash(),
        marathon_mean=marathon.mean if marathon else None,
        marathon_counts=marathon.counts if marathon else [],
        n_events=len(session.events),
        feature_count=session.schema.total_length,
    )
    write_json(paths[REPORT_FILE], report.to_dict())
    logger.info("Run finished: final success %.2f, report at %s", report.final_success_rate, paths[REPORT_FILE])
    return report
