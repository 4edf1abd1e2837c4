"""
Counter-based random streams derived from a master seed.

Every consumer of randomness (network init, each environment, each DRG
worker, the learner's minibatch shuffles) gets its own Philox stream keyed by
(master seed, purpose, index), so results do not depend on call order across
consumers or on how many workers run.
"""

import numpy as np

# Purpose keys for stream derivation
STREAM_NETWORK = 1
STREAM_LEARNER = 2
STREAM_DRG_LAYER = 3
STREAM_ENV_SEEDS = 4
STREAM_POLICY_NOISE = 5
STREAM_DRG_SAMPLES = 6
STREAM_EVAL = 7


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Build a Philox generator for (seed, keys)."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(seq))


def next_seed(rng: np.random.Generator) -> int:
    """Draw a fresh non-negative 63-bit seed from a stream."""
    return int(rng.integers(0, 2**63 - 1))
