"""CVT tessellation and the MOME grid: one bounded Pareto front per cell."""
from __future__ import annotations

import csv
import functools
import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.spatial import cKDTree

from .core import Bounds, Solution, read_solutions_csv, write_solutions_csv
from .unstructured import AdditionOutcome, Status

__all__ = ["CvtTessellation", "build_cvt", "assign_cell", "GridArchive"]

CVT_SAMPLES = 50_000
CVT_ITERATIONS = 100


@dataclass(frozen=True)
class CvtTessellation:
    centroids: np.ndarray
    bounds: Bounds
    seed: int

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"centroid_{i}" for i in range(self.dim)])
            for c in self.centroids:
                w.writerow([repr(float(v)) for v in c])

    @classmethod
    def from_csv(cls, path, bounds: Bounds, seed: int) -> "CvtTessellation":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        cents = np.array([[float(v) for v in r] for r in rows])
        cents.flags.writeable = False
        return cls(cents, bounds, seed)


@functools.lru_cache(maxsize=32)
def _cvt_cached(k: int, low: tuple, high: tuple, seed: int,
                samples: int, iterations: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    low_a, high_a = np.array(low), np.array(high)
    pts = rng.uniform(low_a, high_a, size=(samples, len(low)))
    cents = pts[:k].copy()
    for _ in range(iterations):
        _, label = cKDTree(cents).query(pts)
        counts = np.bincount(label, minlength=k)
        sums = np.stack([np.bincount(label, weights=pts[:, j], minlength=k)
                         for j in range(pts.shape[1])], axis=1)
        filled = counts > 0
        # empty clusters keep their previous position
        cents[filled] = sums[filled] / counts[filled, None]
    cents.flags.writeable = False
    return cents


def build_cvt(k: int, bounds: Bounds, seed: int, samples: int = CVT_SAMPLES,
              iterations: int = CVT_ITERATIONS) -> CvtTessellation:
    """Centroidal Voronoi tessellation by Lloyd's k-means on uniform samples.

    The first ``k`` samples seed the centroids. Results are cached, so repeated
    calls with the same arguments return the same array.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not bounds.finite:
        raise ValueError("CVT bounds must be finite")
    if k > samples:
        raise ValueError(f"k={k} exceeds the sample count {samples}")
    cents = _cvt_cached(k, tuple(bounds.low), tuple(bounds.high), int(seed), samples, iterations)
    return CvtTessellation(cents, bounds, int(seed))


def assign_cell(t: CvtTessellation, x) -> int:
    """Index of the nearest centroid; ties go to the lowest index."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != t.dim:
        raise ValueError(f"feature has dimension {x.size}, tessellation has {t.dim}")
    return int(np.argmin(np.sum((t.centroids - x) ** 2, axis=1)))


def assign_cells(t: CvtTessellation, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64).reshape(-1, t.dim)
    d2 = np.sum((xs[:, None, :] - t.centroids[None, :, :]) ** 2, axis=2)
    return np.argmin(d2, axis=1)


class GridArchive:
    """MOME container: every cell keeps a Pareto front of at most ``max_front_size``.

    ``rng`` drives the uniform eviction when a front overflows.
    """

    def __init__(self, tessellation: CvtTessellation, max_front_size: int, fitness_dim: int,
                 rng: Optional[np.random.Generator] = None):
        if max_front_size < 1:
            raise ValueError("max_front_size must be positive")
        self.tessellation = tessellation
        self.max_front_size = int(max_front_size)
        self.fitness_dim = int(fitness_dim)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.cells: dict[int, list[Solution]] = {}

    @property
    def feature_dim(self) -> int:
        return self.tessellation.dim

    def __len__(self) -> int:
        return sum(len(v) for v in self.cells.values())

    def solutions(self) -> list[Solution]:
        """Stored solutions in id order."""
        return sorted((s for front in self.cells.values() for s in front), key=lambda s: s.id)

    def cell_of(self, solution_id: int) -> int:
        for c, front in self.cells.items():
            if any(s.id == solution_id for s in front):
                return c
        raise KeyError(solution_id)

    def occupied(self) -> list[int]:
        return sorted(c for c, front in self.cells.items() if front)

    def front(self, cell: int) -> np.ndarray:
        members = self.cells.get(cell, [])
        return np.array([s.fitness for s in members]).reshape(-1, self.fitness_dim)

    def try_add(self, s: Solution, feature=None) -> AdditionOutcome:
        """Insert ``s`` into the cell of ``feature`` (default ``s.feature``)."""
        x = s.feature if feature is None else feature
        cell = assign_cell(self.tessellation, x)
        members = self.cells.get(cell, [])
        f = s.fitness
        if f.size != self.fitness_dim:
            raise ValueError(f"fitness has {f.size} objectives, grid expects {self.fitness_dim}")
        removed: list[int] = []
        kept: list[Solution] = []
        for o in members:
            if np.all(o.fitness >= f):
                status = Status.REJECTED_DUPLICATE if np.array_equal(o.fitness, f) \
                    else Status.REJECTED_DOMINATED
                return AdditionOutcome(status)
        for o in members:
            if np.all(f >= o.fitness) and np.any(f > o.fitness):
                removed.append(o.id)
            else:
                kept.append(o)
        evicted: list[int] = []
        if len(kept) + 1 > self.max_front_size:
            victim = kept.pop(int(self.rng.integers(len(kept))))
            evicted.append(victim.id)
        kept.append(s)
        self.cells[cell] = kept
        return AdditionOutcome(Status.ADDED, tuple(removed + evicted), tuple(evicted))

    def add_batch(self, batch: Iterable[Solution]) -> list[AdditionOutcome]:
        return [self.try_add(s) for s in batch]

    def empty_like(self, rng: Optional[np.random.Generator] = None) -> "GridArchive":
        return GridArchive(self.tessellation, self.max_front_size, self.fitness_dim,
                           self.rng if rng is None else rng)

    def sidecar(self) -> dict:
        t = self.tessellation
        return {"container": "grid", "cells": t.k, "seed": t.seed,
                "max_front_size": self.max_front_size, "feature_dim": t.dim,
                "fitness_dim": self.fitness_dim,
                "bounds": [list(map(float, t.bounds.low)), list(map(float, t.bounds.high))]}

    def dump(self, csv_path, genome_dim: int, hand_dim: Optional[int] = None) -> None:
        sols = self.solutions()
        cells = {s.id: c for c, front in self.cells.items() for s in front}
        write_solutions_csv(
            csv_path, sols,
            (genome_dim, self.fitness_dim, self.feature_dim,
             self.feature_dim if hand_dim is None else hand_dim),
            extra_columns={"cell": [cells[s.id] for s in sols]},
        )
        self.tessellation.to_csv(f"{csv_path}.centroids.csv")
        with open(f"{csv_path}.json", "w") as fh:
            json.dump(self.sidecar(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, csv_path) -> "GridArchive":
        with open(f"{csv_path}.json") as fh:
            meta = json.load(fh)
        bounds = Bounds(*meta["bounds"])
        t = CvtTessellation.from_csv(f"{csv_path}.centroids.csv", bounds, meta["seed"])
        g = cls(t, meta["max_front_size"], meta["fitness_dim"])
        solutions, extras = read_solutions_csv(csv_path)
        for s, c in zip(solutions, extras.get("cell", [])):
            g.cells.setdefault(int(c), []).append(s)
        return g
