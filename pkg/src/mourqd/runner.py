"""The optimisation loop shared by every container kind.

One run seeds ``batch_size`` uniform random genomes, then repeats
select -> isoline variation -> evaluate -> add for ``iterations`` steps.
Metrics are always computed on a projection of the container's contents onto
the task's canonical grid (true feature bounds).
"""
from __future__ import annotations

import json
import logging
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy

from . import __version__
from .config import RunConfig, dump_config, read_config_json
from .core import Bounds, Genome, IdCounter, Solution, ensure_dir, read_solutions_csv
from .features import (CscParams, DescriptorReservoir, Encoder, RetrainSchedule, csc_update,
                       encode_batch, flatten_descriptor, pca_fit, reencode, retrain_and_rebuild)
from .grid import GridArchive, build_cvt
from .metrics import (MetricsRecord, MetricsWriter, coverage, global_hypervolume, moqd_score,
                      project_to_grid, read_metrics)
from .rng import Stream, generator
from .tasks import Task, get_task
from .unstructured import UnstructuredArchive
from .variation import IsolineParams, isoline, select_parents

log = logging.getLogger(__name__)

WORKERS_ENV = "MOURQD_WORKERS"

Container = Union[UnstructuredArchive, GridArchive]


@dataclass
class RunResult:
    config: RunConfig
    container: Container
    metrics: list[MetricsRecord]
    evaluations: int
    # archive size after every iteration, index 0 is the seeded population
    size_history: list[int] = field(default_factory=list)
    l_history: list[float] = field(default_factory=list)
    encoder: Optional[Encoder] = None
    out_dir: Optional[Path] = None


def canonical_grid(cfg: RunConfig) -> GridArchive:
    spec = cfg.task_spec
    t = build_cvt(cfg.cvt_cells, spec.feature_bounds, cfg.cvt_seed, samples=cfg.cvt_samples)
    return GridArchive(t, cfg.max_front_size, spec.n_objectives)


class Evaluator:
    """Evaluates genome batches, fanning out to a thread pool when workers > 1."""

    def __init__(self, task: Task, seed: int, workers: int = 1):
        self.task = task
        self.seed = seed
        self.workers = max(1, workers)
        self.count = 0

    def __call__(self, genomes: np.ndarray, ids: list[int]):
        rngs = None
        if self.task.stochastic:
            rngs = [generator(self.seed, Stream.TASK_NOISE, i) for i in ids]
        self.count += len(genomes)
        if self.workers == 1 or len(genomes) < 2 * self.workers:
            return self.task.evaluate_batch(genomes, rngs)
        chunks = np.array_split(np.arange(len(genomes)), self.workers)
        with ThreadPoolExecutor(self.workers) as pool:
            parts = pool.map(
                lambda idx: self.task.evaluate_batch(
                    genomes[idx], None if rngs is None else [rngs[i] for i in idx]),
                chunks,
            )
            return [r for part in parts for r in part]


class Run:
    def __init__(self, cfg: RunConfig, workers: Optional[int] = None):
        self.cfg = cfg
        self.task = get_task(cfg.task)
        self.spec = self.task.spec
        if workers is None:
            workers = int(os.environ.get(WORKERS_ENV, "1"))
        self.evaluate = Evaluator(self.task, cfg.seed, workers)
        self.ids = IdCounter()
        self.params = IsolineParams(cfg.sigma_iso, cfg.sigma_line)
        self.metric_grid = canonical_grid(cfg)
        self.learned = cfg.learned
        self.reservoir = DescriptorReservoir() if self.learned else None
        self.encoder: Optional[Encoder] = None if self.learned else Encoder.hand_defined()
        self.schedule = RetrainSchedule(cfg.iterations) if (self.learned and cfg.retrain) else None
        k = cfg.k if cfg.container == "mour-qd" else None
        self.csc = CscParams(k, cfg.target_size) if k is not None else None
        self.container: Optional[Container] = None
        self.size_history: list[int] = []
        self.l_history: list[float] = []

    # -- solutions ----------------------------------------------------------

    def _solutions(self, genomes: np.ndarray) -> list[Solution]:
        ids = [self.ids() for _ in range(len(genomes))]
        results = self.evaluate(genomes, ids)
        if self.learned:
            self.reservoir.extend(r.descriptor for r in results)
            if self.encoder is None:
                self.encoder = pca_fit(self.reservoir.matrix(), self.cfg.latent)
            feats = encode_batch(self.encoder, [flatten_descriptor(r.descriptor) for r in results])
        else:
            feats = [r.hand_feature for r in results]
        return [
            Solution(i, g, r.fitness, f, r.hand_feature, r.descriptor if self.learned else None)
            for i, g, r, f in zip(ids, genomes, results, feats)
        ]

    def _make_container(self, seeded: list[Solution]) -> Container:
        cfg, spec = self.cfg, self.spec
        m = spec.n_objectives
        evict = generator(cfg.seed, Stream.GRID_EVICTION)
        if cfg.container == "mour-qd":
            d = cfg.latent if self.learned else spec.feature_dim
            return UnstructuredArchive(cfg.l, cfg.capacity, d, m)
        if cfg.container == "mo-aurora-grid":
            feats = np.array([s.feature for s in seeded])
            bounds = Bounds(feats.min(axis=0), feats.max(axis=0))
        else:
            bounds = {"mome": spec.feature_bounds, "mome-small": spec.small_bounds,
                      "mome-large": spec.large_bounds}[cfg.container]
        t = build_cvt(cfg.cvt_cells, bounds, cfg.cvt_seed, samples=cfg.cvt_samples)
        return GridArchive(t, cfg.max_front_size, m, rng=evict)

    # -- loop ----------------------------------------------------------------

    def _record(self, iteration: int) -> MetricsRecord:
        sols = self.container.solutions()
        proj = project_to_grid(sols, self.metric_grid,
                               generator(self.cfg.seed, Stream.PROJECTION, iteration))
        ref = self.spec.reference_point
        l = self.container.l if isinstance(self.container, UnstructuredArchive) else None
        return MetricsRecord(iteration, self.evaluate.count, moqd_score(proj, ref),
                             global_hypervolume(sols, ref), coverage(proj), len(sols), l)

    def _retrain(self) -> None:
        c = self.container
        if isinstance(c, UnstructuredArchive):
            l = c.l
            self.container, self.encoder, new_l = retrain_and_rebuild(
                c, self.reservoir, self.cfg.latent, l, self.csc)
        else:
            self.encoder = pca_fit(self.reservoir.matrix(), self.cfg.latent)
            sols = reencode(c.solutions(), self.encoder)
            fresh = c.empty_like()
            fresh.add_batch(sols)
            self.container = fresh

    def step(self, iteration: int) -> None:
        cfg = self.cfg
        pool = self.container.solutions()
        pairs = select_parents(pool, cfg.batch_size, generator(cfg.seed, Stream.SELECTION, iteration))
        bounds = self.spec.genome_bounds
        children = np.array([
            isoline(Genome(a.genome, bounds), Genome(b.genome, bounds), self.params,
                    generator(cfg.seed, Stream.VARIATION, iteration, j)).values
            for j, (a, b) in enumerate(pairs)
        ])
        self.container.add_batch(self._solutions(children))
        retrained = self.schedule is not None and iteration in self.schedule
        if retrained:
            self._retrain()
        elif self.csc is not None:
            self.container.l = csc_update(self.container.l, len(self.container), self.csc)

    def execute(self, out_dir=None) -> RunResult:
        cfg = self.cfg
        writer = None
        if out_dir is not None:
            out_dir = ensure_dir(out_dir)
            dump_config(cfg, out_dir / "config.json")
            writer = MetricsWriter(out_dir / "metrics.csv")
        started = time.time()
        init = self.spec.genome_bounds.sample(generator(cfg.seed, Stream.INIT), cfg.batch_size)
        seeded = self._solutions(init)
        self.container = self._make_container(seeded)
        self.container.add_batch(seeded)
        records = []

        def track(it):
            self.size_history.append(len(self.container))
            if isinstance(self.container, UnstructuredArchive):
                self.l_history.append(self.container.l)
            if it == 0 or it % cfg.metrics_interval == 0 or it == cfg.iterations:
                rec = self._record(it)
                records.append(rec)
                if writer is not None:
                    writer.append(rec)
                log.info("iter %d evals %d moqd %.4g cov %.3f size %d", it, rec.evaluations,
                         rec.moqd_score, rec.coverage, rec.archive_size)

        track(0)
        for it in range(1, cfg.iterations + 1):
            self.step(it)
            track(it)

        result = RunResult(cfg, self.container, records, self.evaluate.count,
                           self.size_history, self.l_history, self.encoder, out_dir)
        if out_dir is not None:
            self._write_artifacts(out_dir, started)
        return result

    def _write_artifacts(self, out_dir: Path, started: float) -> None:
        cfg = self.cfg
        hand_dim = self.spec.feature_dim
        dump_archive(self.container, out_dir / "archive.csv", self.spec.genome_dim, hand_dim)
        if self.learned and self.encoder is not None:
            self.encoder.to_json(out_dir / "encoder.json")
        manifest = {
            "seed": cfg.seed,
            "task": cfg.task,
            "container": cfg.container,
            "iterations": cfg.iterations,
            "batch_size": cfg.batch_size,
            "evaluations": self.evaluate.count,
            "evaluations_excluding_seed_batch": cfg.batch_size * cfg.iterations,
            "final_archive_size": len(self.container),
            "versions": {"mourqd": __version__, "numpy": np.__version__,
                         "scipy": scipy.__version__, "python": platform.python_version()},
            "started": started,
            "finished": time.time(),
        }
        with open(out_dir / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def run(cfg: RunConfig, out_dir=None, workers: Optional[int] = None) -> RunResult:
    """Execute one run; with ``out_dir`` also write metrics, dumps and a manifest."""
    return Run(cfg, workers).execute(out_dir)


def dump_archive(archive: Container, path, genome_dim: int, hand_dim: Optional[int] = None) -> None:
    archive.dump(path, genome_dim, hand_dim)


def load_archive(path) -> Container:
    with open(f"{path}.json") as fh:
        kind = json.load(fh)["container"]
    return UnstructuredArchive.load(path) if kind == "unstructured" else GridArchive.load(path)


def replay_metrics(run_dir) -> tuple[MetricsRecord, MetricsRecord]:
    """Recompute the final metrics row from the archive dump.

    Returns ``(recomputed, recorded)``; they match for a consistent run directory.
    """
    run_dir = Path(run_dir)
    cfg = read_config_json(run_dir / "config.json")
    with open(run_dir / "manifest.json") as fh:
        manifest = json.load(fh)
    recorded = read_metrics(run_dir / "metrics.csv")[-1]
    sols, _ = read_solutions_csv(run_dir / "archive.csv")
    spec = cfg.task_spec
    proj = project_to_grid(sols, canonical_grid(cfg),
                           generator(cfg.seed, Stream.PROJECTION, recorded.iteration))
    archive = load_archive(run_dir / "archive.csv")
    l = archive.l if isinstance(archive, UnstructuredArchive) else None
    ref = spec.reference_point
    recomputed = MetricsRecord(recorded.iteration, manifest["evaluations"], moqd_score(proj, ref),
                               global_hypervolume(sols, ref), coverage(proj), len(sols), l)
    return recomputed, recorded
