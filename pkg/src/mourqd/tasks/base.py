from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..core import Bounds, EvaluationResult, Genome


class TaskError(ValueError):
    pass


@dataclass(frozen=True)
class TaskSpec:
    """Static description of a task.

    ``feature_bounds`` are the true bounds of the hand feature, used for the
    canonical metric grid. ``small_bounds``/``large_bounds`` are the deliberately
    misestimated grids of the MOME-SMALL/MOME-LARGE baselines, where defined.
    """

    name: str
    genome_bounds: Bounds
    n_objectives: int
    feature_dim: int
    feature_bounds: Bounds
    reference_point: tuple[float, ...]
    initial_l: float
    csc_k: Optional[float] = None
    learned_features: bool = False
    latent_dim: Optional[int] = None
    episode_length: Optional[int] = None
    noise_scale: float = 0.0
    small_bounds: Optional[Bounds] = None
    large_bounds: Optional[Bounds] = None

    def __post_init__(self):
        if len(self.reference_point) != self.n_objectives:
            raise ValueError("reference point length must equal the objective count")
        if self.feature_bounds.dim != self.feature_dim:
            raise ValueError("feature bounds must match the feature dimension")

    @property
    def genome_dim(self) -> int:
        return self.genome_bounds.dim


@dataclass(frozen=True)
class Task:
    """A spec plus its evaluation function ``(genome values, rng) -> EvaluationResult``.

    ``rng`` is only consumed by stochastic tasks.
    """

    spec: TaskSpec
    fn: Callable[..., EvaluationResult] = field(repr=False)
    stochastic: bool = False
    batch_fn: Optional[Callable[[np.ndarray], list[EvaluationResult]]] = field(default=None, repr=False)

    @property
    def name(self) -> str:
        return self.spec.name

    def evaluate(self, genome, rng: Optional[np.random.Generator] = None) -> EvaluationResult:
        values = genome.values if isinstance(genome, Genome) else np.asarray(genome, dtype=np.float64)
        if self.stochastic:
            return self.fn(values, rng)
        return self.fn(values)

    def evaluate_batch(self, genomes, rngs=None) -> list[EvaluationResult]:
        """Evaluate rows of ``genomes``; ``rngs`` holds one generator per row."""
        G = np.asarray(genomes, dtype=np.float64).reshape(len(genomes), -1)
        if self.batch_fn is not None and not self.stochastic:
            return self.batch_fn(G)
        if rngs is None:
            rngs = [None] * len(G)
        return [self.evaluate(g, r) for g, r in zip(G, rngs)]


def check_length(g: np.ndarray, n: int, task: str) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if g.size != n:
        raise TaskError(f"{task} expects a genome of length {n}, got {g.size}")
    return g
