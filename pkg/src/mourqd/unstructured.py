"""Unstructured multi-objective archive with radius-``l`` local Pareto competition.

A candidate competes only with stored solutions whose features lie strictly
closer than ``l``. It is rejected if any of them dominates it (or has the
same fitness); otherwise it is inserted and every neighbour it dominates is
removed. Neighbours that offer a different trade-off are kept.
"""
from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.spatial import cKDTree

from .core import Solution, read_solutions_csv, write_solutions_csv
from .pareto import extract_front

__all__ = ["Status", "AdditionOutcome", "UnstructuredArchive"]

INDEX_THRESHOLD = 2048


class Status(str, enum.Enum):
    ADDED = "added"
    REJECTED_DOMINATED = "rejected-dominated"
    REJECTED_DUPLICATE = "rejected-duplicate"
    REJECTED_CAPACITY = "rejected-capacity"


@dataclass(frozen=True)
class AdditionOutcome:
    status: Status
    removed_ids: tuple[int, ...] = ()
    # subset of removed_ids evicted to respect capacity rather than by dominance
    evicted_for_capacity: tuple[int, ...] = field(default=())

    @property
    def added(self) -> bool:
        return self.status is Status.ADDED


class _BucketIndex:
    """Uniform grid hashing of feature vectors for radius queries."""

    def __init__(self, width: float):
        self.width = width
        self.buckets: dict[tuple[int, ...], set[int]] = {}

    def key(self, x: np.ndarray) -> tuple[int, ...]:
        return tuple(int(v) for v in np.floor(x / self.width))

    def insert(self, slot: int, x: np.ndarray) -> None:
        self.buckets.setdefault(self.key(x), set()).add(slot)

    def remove(self, slot: int, x: np.ndarray) -> None:
        k = self.key(x)
        bucket = self.buckets[k]
        bucket.discard(slot)
        if not bucket:
            del self.buckets[k]

    def candidates(self, x: np.ndarray, r: float) -> Optional[list[int]]:
        """Slots that may lie within ``r`` of ``x``; ``None`` means scan everything."""
        reach = int(math.ceil(r / self.width))
        d = x.size
        if (2 * reach + 1) ** d > max(len(self.buckets), 1):
            return None
        centre = self.key(x)
        out: list[int] = []
        for offset in itertools.product(range(-reach, reach + 1), repeat=d):
            bucket = self.buckets.get(tuple(c + o for c, o in zip(centre, offset)))
            if bucket:
                out.extend(bucket)
        return out


class UnstructuredArchive:
    """Capacity-bounded flat archive.

    Parameters
    ----------
    l : float
        Competition radius in feature space. May be changed between additions
        (container-size control does this every iteration).
    capacity : int
        Maximum number of stored solutions.
    feature_dim, fitness_dim : int
        Dimensions every stored solution must match.
    index_threshold : int
        Archive size above which radius queries go through a bucket index
        instead of a linear scan.
    """

    metric = "euclidean"

    def __init__(self, l: float, capacity: int, feature_dim: int, fitness_dim: int,
                 index_threshold: int = INDEX_THRESHOLD):
        if not l > 0:
            raise ValueError("l must be positive")
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.l = float(l)
        self.capacity = int(capacity)
        self.feature_dim = int(feature_dim)
        self.fitness_dim = int(fitness_dim)
        self.index_threshold = index_threshold
        size = min(self.capacity, 1024)
        self._feat = np.zeros((size, self.feature_dim))
        self._fit = np.zeros((size, self.fitness_dim))
        self._active = np.zeros(size, dtype=bool)
        self._ids = np.full(size, -1, dtype=np.int64)
        self._sol: list[Optional[Solution]] = [None] * size
        self._slot_of: dict[int, int] = {}
        self._free: list[int] = list(range(size - 1, -1, -1))
        self._index = _BucketIndex(self.l)
        self._nn_cache = None

    # -- storage ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._slot_of)

    def __iter__(self):
        return iter(self.solutions())

    def __contains__(self, solution_id: int) -> bool:
        return solution_id in self._slot_of

    def solutions(self) -> list[Solution]:
        """Stored solutions in id order."""
        return [self._sol[self._slot_of[i]] for i in sorted(self._slot_of)]

    def get(self, solution_id: int) -> Solution:
        return self._sol[self._slot_of[solution_id]]

    def _grow(self) -> None:
        old = len(self._active)
        new = min(self.capacity, old * 2)
        self._feat = np.vstack([self._feat, np.zeros((new - old, self.feature_dim))])
        self._fit = np.vstack([self._fit, np.zeros((new - old, self.fitness_dim))])
        self._active = np.concatenate([self._active, np.zeros(new - old, dtype=bool)])
        self._ids = np.concatenate([self._ids, np.full(new - old, -1, dtype=np.int64)])
        self._sol.extend([None] * (new - old))
        self._free.extend(range(new - 1, old - 1, -1))

    def _insert(self, s: Solution) -> None:
        if not self._free:
            self._grow()
        slot = self._free.pop()
        self._feat[slot] = s.feature
        self._fit[slot] = s.fitness
        self._active[slot] = True
        self._ids[slot] = s.id
        self._sol[slot] = s
        self._slot_of[s.id] = slot
        self._index.insert(slot, s.feature)
        self._nn_cache = None

    def _remove(self, solution_id: int) -> None:
        slot = self._slot_of.pop(solution_id)
        self._index.remove(slot, self._feat[slot])
        self._active[slot] = False
        self._ids[slot] = -1
        self._sol[slot] = None
        self._free.append(slot)
        self._nn_cache = None

    # -- queries ------------------------------------------------------------

    def _check_feature(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.size != self.feature_dim:
            raise ValueError(f"feature has dimension {x.size}, archive expects {self.feature_dim}")
        return x

    def _neighbor_slots(self, x: np.ndarray, r: float) -> np.ndarray:
        cand = None
        if len(self) > self.index_threshold:
            cand = self._index.candidates(x, r)
        if cand is None:
            slots = np.flatnonzero(self._active)
        else:
            slots = np.fromiter(cand, dtype=np.intp, count=len(cand))
        if slots.size == 0:
            return slots
        dist = np.sqrt(np.sum((self._feat[slots] - x) ** 2, axis=1))
        hits = slots[dist < r]
        return hits[np.argsort(self._ids[hits], kind="stable")]

    def neighbors(self, x, r: float) -> list[Solution]:
        """Stored solutions strictly closer than ``r`` to ``x``, in id order."""
        x = self._check_feature(x)
        return [self._sol[k] for k in self._neighbor_slots(x, r)]

    def local_front(self, x, r: float) -> np.ndarray:
        """Non-dominated fitness vectors among the neighbours within ``r``."""
        x = self._check_feature(x)
        slots = self._neighbor_slots(x, r)
        return extract_front(self._fit[slots].reshape(-1, self.fitness_dim))

    def nearest_neighbor_distances(self) -> tuple[np.ndarray, np.ndarray]:
        """``(ids, distance to the nearest other stored solution)`` in id order."""
        if self._nn_cache is None:
            self._nn_cache = self._compute_nn()
        return self._nn_cache

    def _compute_nn(self):
        slots = self._sorted_slots()
        ids = self._ids[slots]
        if len(ids) < 2:
            return ids, np.full(len(ids), np.inf)
        feats = self._feat[slots]
        dist, _ = cKDTree(feats).query(feats, k=2)
        return ids, dist[:, 1]

    def _sorted_slots(self) -> np.ndarray:
        slots = np.flatnonzero(self._active)
        return slots[np.argsort(self._ids[slots], kind="stable")]

    # -- mutation -------------------------------------------------------------

    def try_add(self, s: Solution) -> AdditionOutcome:
        x = self._check_feature(s.feature)
        f = s.fitness
        if f.size != self.fitness_dim:
            raise ValueError(f"fitness has {f.size} objectives, archive expects {self.fitness_dim}")
        slots = self._neighbor_slots(x, self.l)
        fits = self._fit[slots]
        if slots.size:
            ge = np.all(fits >= f, axis=1)
            gt = np.any(fits > f, axis=1)
            if np.any(ge & gt):
                return AdditionOutcome(Status.REJECTED_DOMINATED)
            if np.any(ge & ~gt):
                return AdditionOutcome(Status.REJECTED_DUPLICATE)
            beaten = np.all(f >= fits, axis=1) & np.any(f > fits, axis=1)
            removed = [self._sol[k].id for k in slots[beaten]]
        else:
            removed = []

        evicted: list[int] = []
        if len(self) - len(removed) + 1 > self.capacity:
            victim = self._crowding_victim(x)
            if victim is None:
                return AdditionOutcome(Status.REJECTED_CAPACITY)
            evicted.append(victim)

        for i in removed + evicted:
            self._remove(i)
        self._insert(s)
        return AdditionOutcome(Status.ADDED, tuple(removed + evicted), tuple(evicted))

    def _crowding_victim(self, x: np.ndarray) -> Optional[int]:
        ids, nn = self.nearest_neighbor_distances()
        if not len(ids):
            return None
        feats = self._feat[self._sorted_slots()]
        own = float(np.min(np.sqrt(np.sum((feats - x) ** 2, axis=1))))
        k = int(np.argmin(nn))  # first minimum is the lowest id
        if own > nn[k]:
            return int(ids[k])
        return None

    def add_batch(self, batch: Iterable[Solution]) -> list[AdditionOutcome]:
        return [self.try_add(s) for s in batch]

    def empty_like(self, l: Optional[float] = None) -> "UnstructuredArchive":
        return UnstructuredArchive(self.l if l is None else l, self.capacity,
                                   self.feature_dim, self.fitness_dim, self.index_threshold)

    def rebuild(self, solutions: Iterable[Solution], new_l: float) -> "UnstructuredArchive":
        """Fresh archive with radius ``new_l`` filled by re-adding ``solutions`` in id order."""
        fresh = self.empty_like(new_l)
        fresh.add_batch(sorted(solutions, key=lambda s: s.id))
        return fresh

    # -- serialisation ---------------------------------------------------------

    def sidecar(self) -> dict:
        return {"container": "unstructured", "l": self.l, "capacity": self.capacity,
                "metric": self.metric, "feature_dim": self.feature_dim,
                "fitness_dim": self.fitness_dim}

    def dump(self, csv_path, genome_dim: int, hand_dim: Optional[int] = None) -> None:
        write_solutions_csv(csv_path, self.solutions(),
                            (genome_dim, self.fitness_dim, self.feature_dim,
                             self.feature_dim if hand_dim is None else hand_dim))
        with open(f"{csv_path}.json", "w") as fh:
            json.dump(self.sidecar(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, csv_path) -> "UnstructuredArchive":
        with open(f"{csv_path}.json") as fh:
            meta = json.load(fh)
        archive = cls(meta["l"], meta["capacity"], meta["feature_dim"], meta["fitness_dim"])
        solutions, _ = read_solutions_csv(csv_path)
        for s in solutions:
            archive._insert(s)
        return archive
