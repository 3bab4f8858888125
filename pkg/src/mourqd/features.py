"""Hand-defined and learned feature extraction, container-size control, retraining.

The learned encoder is PCA: descriptors are flattened to a fixed length,
centred, and projected on the leading principal components.
"""
from __future__ import annotations

import collections
import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import DescriptorData, Solution
from .unstructured import UnstructuredArchive

__all__ = [
    "Encoder", "CscParams", "RetrainSchedule", "DescriptorReservoir",
    "flatten_descriptor", "pca_fit", "encode", "reconstruct", "csc_update",
    "retrain_and_rebuild",
]

TRAJECTORY_STEPS = 32
RESERVOIR_ROWS = 20_000
MIN_L = 1e-9


def flatten_descriptor(x: DescriptorData) -> np.ndarray:
    """Fixed-length vector for ``x``; trajectories are subsampled to 32 steps first."""
    raw = x.raw
    if x.layout == "trajectory":
        idx = np.round(np.linspace(0, len(raw) - 1, TRAJECTORY_STEPS)).astype(int)
        raw = raw[idx]
    return raw.reshape(-1)


@dataclass(frozen=True)
class Encoder:
    kind: str
    mean: Optional[np.ndarray] = None
    components: Optional[np.ndarray] = None  # (input_dim, latent_dim)

    def __post_init__(self):
        if self.kind not in ("hand-defined", "pca"):
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if self.kind == "pca":
            if self.mean is None or self.components is None:
                raise ValueError("a pca encoder needs a mean and components")
            if self.components.shape[0] != self.mean.size:
                raise ValueError("component rows must match the mean length")
            if self.latent_dim > self.components.shape[0]:
                raise ValueError("latent_dim cannot exceed the input dimension")

    @classmethod
    def hand_defined(cls) -> "Encoder":
        return cls("hand-defined")

    @property
    def latent_dim(self) -> Optional[int]:
        return None if self.components is None else self.components.shape[1]

    @property
    def input_dim(self) -> Optional[int]:
        return None if self.mean is None else self.mean.size

    def to_json(self, path) -> None:
        payload = {"kind": self.kind}
        if self.kind == "pca":
            payload.update(latent_dim=self.latent_dim, mean=self.mean.tolist(),
                           components=self.components.tolist())
        with open(path, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "Encoder":
        with open(path) as fh:
            payload = json.load(fh)
        if payload["kind"] != "pca":
            return cls(payload["kind"])
        comps = np.array(payload["components"], dtype=np.float64).reshape(len(payload["mean"]), -1)
        return cls("pca", np.array(payload["mean"], dtype=np.float64), comps)


def pca_fit(data, latent_dim: int) -> Encoder:
    """Fit a PCA encoder to the rows of ``data``.

    Components are ordered by explained variance, and each is signed so its
    largest-magnitude entry is positive.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("data must be a matrix with one descriptor per row")
    n, p = X.shape
    if latent_dim < 1 or latent_dim > p:
        raise ValueError(f"latent_dim must be in [1, {p}], got {latent_dim}")
    if n < latent_dim + 1:
        raise ValueError(f"need at least {latent_dim + 1} rows to fit {latent_dim} components, got {n}")
    mean = X.mean(axis=0)
    centred = X - mean
    if not np.any(centred):
        raise ValueError("descriptor data has zero total variance")
    _, _, vt = np.linalg.svd(centred, full_matrices=False)
    comps = vt[:latent_dim].T.copy()
    pivot = np.argmax(np.abs(comps), axis=0)
    signs = np.sign(comps[pivot, np.arange(latent_dim)])
    comps *= np.where(signs == 0, 1.0, signs)
    return Encoder("pca", mean, comps)


def encode(e: Encoder, x: DescriptorData, hand_feature=None) -> np.ndarray:
    """Feature vector for ``x``; hand-defined encoders return ``hand_feature`` unchanged."""
    if e.kind == "hand-defined":
        if hand_feature is None:
            raise ValueError("a hand-defined encoder needs the task's hand feature")
        return np.asarray(hand_feature, dtype=np.float64)
    flat = flatten_descriptor(x) if isinstance(x, DescriptorData) else np.asarray(x, dtype=np.float64)
    if flat.size != e.input_dim:
        raise ValueError(f"descriptor flattens to {flat.size} values, encoder expects {e.input_dim}")
    return (flat - e.mean) @ e.components


def encode_batch(e: Encoder, rows) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64).reshape(-1, e.input_dim)
    return (rows - e.mean) @ e.components


def reconstruct(e: Encoder, z) -> np.ndarray:
    return e.mean + np.asarray(z, dtype=np.float64) @ e.components.T


@dataclass(frozen=True)
class CscParams:
    k: float
    n_target: int

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")
        if self.n_target < 1:
            raise ValueError("n_target must be positive")


def csc_update(l: float, archive_size: int, p: CscParams) -> float:
    """Container-size control: ``l * (1 + k * (size - n_target))``, kept above 1e-9."""
    if not l > 0:
        raise ValueError("l must be positive")
    return max(l * (1.0 + p.k * (archive_size - p.n_target)), MIN_L)


class RetrainSchedule:
    """Retrain at iterations 2, 4, 8, 16, ... up to ``budget``."""

    def __init__(self, budget: int, first: int = 2):
        self.budget = budget
        self.triggers = []
        t = first
        while t <= budget:
            self.triggers.append(t)
            t *= 2
        self._set = frozenset(self.triggers)

    def __contains__(self, iteration: int) -> bool:
        return iteration in self._set

    def __iter__(self):
        return iter(self.triggers)


class DescriptorReservoir:
    """Keeps the most recent ``max_rows`` flattened descriptors."""

    def __init__(self, max_rows: int = RESERVOIR_ROWS):
        self.rows: collections.deque = collections.deque(maxlen=max_rows)

    def extend(self, descriptors: Iterable[DescriptorData]) -> None:
        for d in descriptors:
            self.rows.append(flatten_descriptor(d))

    def __len__(self) -> int:
        return len(self.rows)

    def matrix(self) -> np.ndarray:
        return np.array(self.rows)


def reencode(solutions: Sequence[Solution], e: Encoder) -> list[Solution]:
    if not solutions:
        return []
    for s in solutions:
        if s.descriptor is None:
            raise ValueError(f"solution {s.id} carries no descriptor data to re-encode")
    feats = encode_batch(e, [flatten_descriptor(s.descriptor) for s in solutions])
    return [s.with_feature(f) for s, f in zip(solutions, feats)]


def retrain_and_rebuild(archive: UnstructuredArchive, all_descriptors, latent_dim: int,
                        l: float, csc: Optional[CscParams]):
    """Refit the encoder, re-encode the archive and rebuild it with an updated ``l``.

    ``all_descriptors`` is a matrix of flattened descriptors (or a reservoir).
    Returns ``(archive, encoder, new_l)``.
    """
    data = all_descriptors.matrix() if isinstance(all_descriptors, DescriptorReservoir) \
        else np.asarray(all_descriptors)
    enc = pca_fit(data, latent_dim)
    solutions = reencode(archive.solutions(), enc)
    new_l = csc_update(l, len(archive), csc) if csc is not None else l
    return archive.rebuild(solutions, new_l), enc, new_l
