"""Evaluation metrics computed on a projection onto a fixed MOME grid."""
from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Solution
from .grid import GridArchive
from .pareto import extract_front, hypervolume

__all__ = [
    "MetricsRecord", "MetricsWriter", "read_metrics", "project_to_grid", "front_hypervolume",
    "moqd_score", "global_hypervolume", "coverage", "qd_score",
]


def front_hypervolume(front, ref) -> float:
    """Hypervolume that also accepts a single objective (best fitness above ``ref``)."""
    ref = np.asarray(ref, dtype=np.float64).reshape(-1)
    if ref.size == 1:
        pts = np.asarray(front, dtype=np.float64).reshape(-1)
        return float(max(pts.max() - ref[0], 0.0)) if pts.size else 0.0
    return hypervolume(front, ref)


def project_to_grid(solutions: Iterable[Solution], template: GridArchive,
                    rng: Optional[np.random.Generator] = None) -> GridArchive:
    """Fresh copy of ``template`` filled with ``solutions`` (id order) by hand feature."""
    grid = template.empty_like(rng if rng is not None else np.random.default_rng(0))
    for s in sorted(solutions, key=lambda s: s.id):
        if s.hand_feature.size != grid.feature_dim:
            raise ValueError(
                f"hand feature has dimension {s.hand_feature.size}, grid has {grid.feature_dim}"
            )
        grid.try_add(s, feature=s.hand_feature)
    return grid


def moqd_score(g: GridArchive, ref) -> float:
    """Sum over occupied cells of the cell front's hypervolume."""
    return float(sum(front_hypervolume(g.front(c), ref) for c in g.occupied()))


def global_hypervolume(solutions: Sequence[Solution], ref) -> float:
    if not solutions:
        return 0.0
    fits = np.array([s.fitness for s in solutions])
    return front_hypervolume(extract_front(fits), ref)


def coverage(g: GridArchive) -> float:
    return len(g.occupied()) / g.tessellation.k


def qd_score(g: GridArchive) -> float:
    """Sum of the elite fitnesses of a single-objective grid."""
    if g.fitness_dim != 1:
        raise ValueError(f"qd_score needs a single-objective grid, got m={g.fitness_dim}")
    return float(sum(s.fitness[0] for c in g.occupied() for s in g.cells[c]))


@dataclass(frozen=True)
class MetricsRecord:
    iteration: int
    evaluations: int
    moqd_score: float
    global_hypervolume: float
    coverage: float
    archive_size: int
    current_l: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError(f"coverage must lie in [0, 1], got {self.coverage}")

    def row(self) -> list[str]:
        out = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out.append("" if v is None else repr(float(v)) if isinstance(v, float) else str(v))
        return out


METRICS_HEADER = [f.name for f in dataclasses.fields(MetricsRecord)]


class MetricsWriter:
    """Append-only metrics CSV with a fixed header."""

    def __init__(self, path):
        self.path = Path(path)
        with open(self.path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(METRICS_HEADER)
        self._last_evals = -1

    def append(self, rec: MetricsRecord) -> None:
        if rec.evaluations < self._last_evals:
            raise ValueError("evaluation counts must be non-decreasing across a run")
        self._last_evals = rec.evaluations
        with open(self.path, "a", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(rec.row())


def read_metrics(path) -> list[MetricsRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            MetricsRecord(
                iteration=int(r["iteration"]),
                evaluations=int(r["evaluations"]),
                moqd_score=float(r["moqd_score"]),
                global_hypervolume=float(r["global_hypervolume"]),
                coverage=float(r["coverage"]),
                archive_size=int(r["archive_size"]),
                current_l=float(r["current_l"]) if r["current_l"] else None,
            )
            for r in reader
        ]
