"""Seeded Monte-Carlo engine with splittable, schedule-independent substreams.

Every trial draws from its own counter-based Philox stream keyed by
(seed, trial_index), so results do not depend on execution order and any
subset of trials can be reproduced in isolation.  Reductions run in fixed
index order with compensated summation.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["Estimate", "substream", "sample_occupancy", "estimate", "thread_count"]


@dataclass(frozen=True)
class Estimate:
    """Monte-Carlo estimate with its standard error and provenance."""

    mean: float
    stderr: float
    trials: int
    seed: int

    def within(self, expected: float, sigmas: float = 3.0, floor: float = 0.0) -> bool:
        """True iff expected lies within sigmas standard errors of the mean."""
        return abs(self.mean - expected) <= sigmas * self.stderr + floor


def substream(seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial, keyed by (seed, trial_index)."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(trial_index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_occupancy(shape, p: float, seed: int, trial_index: int) -> np.ndarray:
    """Boolean occupancy array: independent Bernoulli(p) per cell for one trial."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = substream(seed, trial_index)
    return rng.random(shape) < p


def estimate(fn: Callable[[np.random.Generator], float], trials: int, seed: int) -> Estimate:
    """Run fn once per trial on its own substream and reduce deterministically.

    Args:
        fn: trial function mapping a per-trial Generator to a real value.
        trials: number of independent trials (>= 2, for a defined stderr).
        seed: master seed; trial t uses substream(seed, t).

    Returns:
        Estimate with mean, stderr (sample std / sqrt(trials); ddof=1) and provenance.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    values = [float(fn(substream(seed, t))) for t in range(trials)]
    mean = math.fsum(values) / trials
    var = math.fsum((v - mean) ** 2 for v in values) / (trials - 1)
    stderr = math.sqrt(var / trials)
    return Estimate(mean=mean, stderr=stderr, trials=trials, seed=seed)


def thread_count() -> int:
    """Worker count from MUXKIT_THREADS (default 1; results never depend on it)."""
    raw = os.environ.get("MUXKIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
