"""Shared domain types: genomes, solutions, evaluation results and the CSV dump."""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


class EvaluationError(ValueError):
    """Raised when a task produces a non-finite fitness or feature."""


def _frozen(values, name: str, allow_empty: bool = False) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if not allow_empty and arr.size == 0:
        raise ValueError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(f"{name} contains NaN or Inf: {arr}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Bounds:
    """Per-dimension closed intervals; infinite ends mean unbounded."""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.asarray(self.low, dtype=np.float64).reshape(-1).copy()
        high = np.asarray(self.high, dtype=np.float64).reshape(-1).copy()
        if low.shape != high.shape:
            raise ValueError("low and high must have the same length")
        if np.any(low > high):
            raise ValueError("every lower bound must be <= its upper bound")
        low.flags.writeable = False
        high.flags.writeable = False
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @classmethod
    def box(cls, low: float, high: float, dim: int) -> "Bounds":
        return cls(np.full(dim, low), np.full(dim, high))

    @classmethod
    def unbounded(cls, dim: int) -> "Bounds":
        return cls(np.full(dim, -np.inf), np.full(dim, np.inf))

    @property
    def dim(self) -> int:
        return self.low.size

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.low)) and np.all(np.isfinite(self.high)))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.low) and np.all(x <= self.high))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if not self.finite:
            raise ValueError("cannot sample uniformly from unbounded intervals")
        return rng.uniform(self.low, self.high, size=(n, self.dim))


@dataclass(frozen=True)
class Genome:
    values: np.ndarray
    bounds: Optional[Bounds] = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, "genome"))
        if self.bounds is not None and self.bounds.dim != self.values.size:
            raise ValueError(
                f"genome has {self.values.size} genes but bounds cover {self.bounds.dim}"
            )

    def __len__(self) -> int:
        return self.values.size


def clip_genome(g: Genome) -> Genome:
    """Clamp every bounded coordinate of ``g`` into its interval."""
    if g.bounds is None:
        return g
    return Genome(np.clip(g.values, g.bounds.low, g.bounds.high), g.bounds)


@dataclass(frozen=True)
class DescriptorData:
    """Raw data a solution emits during evaluation, e.g. a trajectory or an image.

    ``layout`` is a tag naming the producer, such as ``"trajectory"`` or
    ``"image:8x8"``. Rows are time steps for trajectory layouts.
    """

    raw: np.ndarray
    layout: str

    def __post_init__(self):
        raw = np.array(self.raw, dtype=np.float64)
        if raw.ndim == 1:
            raw = raw.reshape(1, -1)
        if raw.ndim != 2 or raw.size == 0:
            raise ValueError("descriptor data must be a non-empty matrix")
        if not np.all(np.isfinite(raw)):
            raise EvaluationError("descriptor data contains NaN or Inf")
        raw.flags.writeable = False
        object.__setattr__(self, "raw", raw)


@dataclass(frozen=True)
class EvaluationResult:
    fitness: np.ndarray
    descriptor: DescriptorData
    hand_feature: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "fitness", _frozen(self.fitness, "fitness"))
        object.__setattr__(self, "hand_feature", _frozen(self.hand_feature, "hand feature"))


@dataclass(frozen=True)
class Solution:
    """A genome together with its fitness vector and feature vector.

    ``hand_feature`` is the task's ground-truth feature. It equals ``feature``
    unless the run uses a learned encoder, and is what metric projection uses.
    """

    id: int
    genome: np.ndarray
    fitness: np.ndarray
    feature: np.ndarray
    hand_feature: Optional[np.ndarray] = None
    descriptor: Optional[DescriptorData] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "genome", _frozen(self.genome, "genome"))
        object.__setattr__(self, "fitness", _frozen(self.fitness, "fitness"))
        object.__setattr__(self, "feature", _frozen(self.feature, "feature"))
        hand = self.feature if self.hand_feature is None else _frozen(self.hand_feature, "hand feature")
        object.__setattr__(self, "hand_feature", hand)

    def with_feature(self, feature) -> "Solution":
        return Solution(self.id, self.genome, self.fitness, feature, self.hand_feature, self.descriptor)


class IdCounter:
    """Hands out unique, monotonically increasing solution ids."""

    def __init__(self, start: int = 0):
        self._it = itertools.count(start)

    def __call__(self) -> int:
        return next(self._it)


# --- CSV dump -------------------------------------------------------------

def write_solutions_csv(
    path,
    solutions: Iterable[Solution],
    dims: tuple[int, ...],
    extra_columns: Optional[dict[str, Sequence]] = None,
    hand_features: bool = True,
) -> None:
    """Write one row per solution: id, genome, fitness, feature (and hand feature).

    ``dims`` is ``(n, m, d)`` or ``(n, m, d, hand_d)`` so an empty archive
    still gets a full header.
    ``extra_columns`` maps column name to one value per solution.
    """
    solutions = list(solutions)
    n, m, d = dims[:3]
    hd = dims[3] if len(dims) > 3 else d
    extra_columns = extra_columns or {}
    header = ["id"]
    header += [f"genome_{i}" for i in range(n)]
    header += [f"fitness_{i}" for i in range(m)]
    header += [f"feature_{i}" for i in range(d)]
    if hand_features:
        header += [f"hand_feature_{i}" for i in range(hd)]
    header += list(extra_columns)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for k, s in enumerate(solutions):
            row = [str(s.id)]
            row += [repr(float(v)) for v in s.genome]
            row += [repr(float(v)) for v in s.fitness]
            row += [repr(float(v)) for v in s.feature]
            if hand_features:
                row += [repr(float(v)) for v in s.hand_feature]
            row += [str(col[k]) for col in extra_columns.values()]
            writer.writerow(row)


def read_solutions_csv(path) -> tuple[list[Solution], dict[str, list[str]]]:
    """Inverse of :func:`write_solutions_csv`.

    Returns the solutions and any extra (non-numeric-block) columns as strings.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)

    def cols(prefix):
        return [i for i, h in enumerate(header) if h.startswith(prefix) and h[len(prefix):].isdigit()]

    gi, fi, xi, hi = cols("genome_"), cols("fitness_"), cols("feature_"), cols("hand_feature_")
    known = set(gi) | set(fi) | set(xi) | set(hi) | {0}
    extras = {h: [] for i, h in enumerate(header) if i not in known}
    extra_idx = [i for i in range(len(header)) if i not in known]
    solutions = []
    for row in rows:
        hand = [float(row[i]) for i in hi] if hi else None
        solutions.append(
            Solution(
                id=int(row[0]),
                genome=[float(row[i]) for i in gi],
                fitness=[float(row[i]) for i in fi],
                feature=[float(row[i]) for i in xi],
                hand_feature=hand,
            )
        )
        for i in extra_idx:
            extras[header[i]].append(row[i])
    return solutions, extras


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
