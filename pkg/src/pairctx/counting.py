"""Poisson coincidence-count simulation with counter-based random streams.

The total number of detected pairs in one acquisition is Poisson with the
configured mean, and the pairs split multinomially across the context's four
outcomes.  Every context draws from its own stream derived from
(seed, context index), so adding, removing, or reordering other acquisitions
never changes a context's counts and parallel execution is bit-identical to
serial execution.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .metrics import ContextCounts
from .optics import ContextProbabilities, MeasurementContext

_MASK63 = (1 << 63) - 1


def derive_rng(*keys: int) -> np.random.Generator:
    """Deterministic generator keyed by a tuple of integers."""
    entropy = [int(k) & _MASK63 for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def angle_key(degrees: float) -> int:
    """Stable integer key for an angle, at micro-degree resolution."""
    return int(round((degrees + 360.0) * 1_000_000))


@dataclass(frozen=True)
class AcquisitionPlan:
    """Ordered list of contexts to acquire with one mean pair budget."""

    contexts: tuple[MeasurementContext, ...]
    mean_pairs_per_context: float
    duration_s: float = 10.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "contexts", tuple(self.contexts))
        if not (self.mean_pairs_per_context > 0) or not math.isfinite(self.mean_pairs_per_context):
            raise ValueError("mean pairs per context must be positive and finite")
        if not (self.duration_s > 0):
            raise ValueError("duration must be positive")


def sample_context(
    probs: ContextProbabilities,
    mean_total: float,
    rng: np.random.Generator,
    duration_s: float = 10.0,
) -> ContextCounts:
    """Draw one acquisition: Poisson total, multinomial split across outcomes."""
    if not (mean_total > 0) or not math.isfinite(mean_total):
        raise ValueError("mean total must be positive and finite")
    pairs = probs.context.outcome_pairs()
    pvec = np.array([probs[pair] for pair in pairs], dtype=float)
    pvec = pvec / pvec.sum()
    total = int(rng.poisson(mean_total))
    draws = rng.multinomial(total, pvec) if total > 0 else np.zeros(len(pairs), dtype=int)
    counts = {pair: int(k) for pair, k in zip(pairs, draws)}
    return ContextCounts(probs.context, counts, duration_s)


def run_plan(plan: AcquisitionPlan, probabilities: dict) -> list[ContextCounts]:
    """Acquire every planned context from its (seed, index)-derived stream.

    ``probabilities`` maps each planned context to its ContextProbabilities.
    """
    results = []
    for index, context in enumerate(plan.contexts):
        probs = probabilities[context]
        if probs.context != context:
            raise ValueError("probability table does not match the planned context")
        rng = derive_rng(plan.seed, index)
        results.append(sample_context(probs, plan.mean_pairs_per_context, rng, plan.duration_s))
    return results
