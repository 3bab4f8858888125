"""Uniform parent selection and the isoline (Iso+LineDD) variation operator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Genome, Solution, clip_genome


@dataclass(frozen=True)
class IsolineParams:
    sigma_iso: float = 0.005
    sigma_line: float = 0.05

    def __post_init__(self):
        for name in ("sigma_iso", "sigma_line"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


def select_parents(solutions: Sequence[Solution], count: int,
                   rng: np.random.Generator) -> list[tuple[Solution, Solution]]:
    """``count`` pairs drawn uniformly with replacement; a pair may repeat a parent."""
    if not solutions:
        raise ValueError("cannot select parents from an empty archive")
    idx = rng.integers(len(solutions), size=(count, 2))
    return [(solutions[i], solutions[j]) for i, j in idx]


def isoline(p1: Genome, p2: Genome, params: IsolineParams, rng: np.random.Generator) -> Genome:
    """Child near ``p1``: per-gene Gaussian noise plus a shared step along ``p2 - p1``."""
    if len(p1) != len(p2):
        raise ValueError(f"parent lengths differ: {len(p1)} vs {len(p2)}")
    x, y = p1.values, p2.values
    iso = rng.standard_normal(x.size)
    line = rng.standard_normal()
    child = x + params.sigma_iso * iso + params.sigma_line * line * (y - x)
    return clip_genome(Genome(child, p1.bounds))
