"""
Online importance of reducible features, measured by activation counts.

A feature is "activated" on a step when its normalized reading exceeds the
activation threshold; its importance is the fraction of observed steps on
which it was activated.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np


@dataclass
class ImportanceLedger:
    """Activation counters for the tracked (reducible) features."""

    feature_indices: Tuple[int, ...]
    activation_threshold: float = 0.05
    activation_count: np.ndarray = field(default=None)
    steps_observed: int = 0

    def __post_init__(self):
        self.feature_indices = tuple(int(i) for i in self.feature_indices)
        if self.activation_count is None:
            self.activation_count = np.zeros(len(self.feature_indices), dtype=np.int64)

    @property
    def n_features(self) -> int:
        return len(self.feature_indices)

    def rates(self) -> np.ndarray:
        if self.steps_observed == 0:
            return np.zeros(self.n_features)
        return self.activation_count / float(self.steps_observed)


def record_activations(
    ledger: ImportanceLedger, tactile_obs: np.ndarray, activation_threshold: Optional[float] = None
) -> ImportanceLedger:
    """
    Count activations for one step, or for a batch of steps.

    Args:
        ledger: Ledger to update in place
        tactile_obs: Readings of the tracked features, (n,) or (steps, n)
        activation_threshold: Overrides the ledger's threshold

    Returns:
        The updated ledger
    """
    readings = np.asarray(tactile_obs, dtype=np.float64)
    rows = readings[None, :] if readings.ndim == 1 else readings
    if rows.ndim != 2 or rows.shape[1] != ledger.n_features:
        raise ValueError(f"Expected {ledger.n_features} tracked readings, got shape {readings.shape}")
    eps = ledger.activation_threshold if activation_threshold is None else activation_threshold
    ledger.activation_count += (rows > eps).sum(axis=0)
    ledger.steps_observed += rows.shape[0]
    return ledger


def merge_ledgers(ledgers: Sequence[ImportanceLedger]) -> ImportanceLedger:
    """Sum per-worker ledgers tracking the same features."""
    if not ledgers:
        raise ValueError("Nothing to merge")
    first = ledgers[0]
    for other in ledgers[1:]:
        if other.feature_indices != first.feature_indices:
            raise ValueError("Ledgers track different features")
    return ImportanceLedger(
        feature_indices=first.feature_indices,
        activation_threshold=first.activation_threshold,
        activation_count=sum((l.activation_count for l in ledgers), np.zeros_like(first.activation_count)),
        steps_observed=sum(l.steps_observed for l in ledgers),
    )


def reset_ledger(ledger: ImportanceLedger) -> ImportanceLedger:
    ledger.activation_count[:] = 0
    ledger.steps_observed = 0
    return ledger


def importance_scores(ledger: ImportanceLedger, exclude: Iterable[int] = ()) -> Tuple[Tuple[int, ...], np.ndarray]:
    """
    Activation rate of every tracked feature not yet reduced.

    Args:
        ledger: Ledger with at least one observed step
        exclude: Observation indices already reduced

    Returns:
        Tuple of (observation indices, scores) in tracking order
    """
    if ledger.steps_observed == 0:
        raise ValueError("Importance ledger has no observed steps")
    excluded = set(int(i) for i in exclude)
    keep = [k for k, idx in enumerate(ledger.feature_indices) if idx not in excluded]
    indices = tuple(ledger.feature_indices[k] for k in keep)
    return indices, ledger.rates()[keep]


def select_reduction(g: np.ndarray, i: int, indices: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """
    Pick the i least important features.

    Ties go to the lowest position. The result is ordered from least to most
    important.

    Args:
        g: Importance scores
        i: Number of features to reduce
        indices: Labels for the positions of g (defaults to the positions)

    Returns:
        Selected labels
    """
    g = np.asarray(g, dtype=np.float64)
    if i < 0 or i > g.size:
        raise ValueError(f"Cannot reduce {i} features, only {g.size} remain")
    order = np.argsort(g, kind="stable")[:i]
    labels = list(range(g.size)) if indices is None else list(indices)
    return tuple(int(labels[k]) for k in order)
