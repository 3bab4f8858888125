"""Repeated noisy evaluation with reproducibility as a second objective."""
from __future__ import annotations

import numpy as np

from ..core import DescriptorData, EvaluationResult
from .base import Task

REPLICATIONS = 16


def eval_uncertain(inner: Task, g, replications: int = REPLICATIONS, noise: float = 0.0,
                   rng: np.random.Generator = None) -> EvaluationResult:
    """Evaluate ``inner`` on ``replications`` noisy copies of the genome.

    Each copy gets independent Gaussian noise of scale ``noise`` and is
    clipped to the genome bounds. The first objective is the mean of the
    replicates' summed objectives; the second is minus the mean (over feature
    dimensions) of the standard deviation of the replicate features.
    """
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if rng is None:
        rng = np.random.default_rng(0)
    bounds = inner.spec.genome_bounds
    noisy = g + noise * rng.standard_normal((replications, g.size))
    noisy = np.clip(noisy, bounds.low, bounds.high)
    results = inner.evaluate_batch(noisy)
    scalar = np.array([float(np.sum(r.fitness)) for r in results])
    feats = np.array([r.hand_feature for r in results])
    # shifting by the first replicate keeps identical replicates at exactly zero spread
    spread = (feats - feats[0]).std(axis=0, ddof=1) if replications > 1 else np.zeros(feats.shape[1])
    raw = np.mean([r.descriptor.raw for r in results], axis=0)
    return EvaluationResult(
        [float(scalar.mean()), -float(spread.mean())],
        DescriptorData(raw, results[0].descriptor.layout),
        feats.mean(axis=0),
    )
