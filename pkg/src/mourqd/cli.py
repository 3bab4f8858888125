"""Command line entry point.

    mourqd run CONFIG [--seed N] [--out DIR] [--profile desk|paper]
    mourqd replay-metrics RUN_DIR
    mourqd plot RUN_DIR

Failures exit nonzero and print one JSON line ``{"error": ..., "message": ...}``
to stderr. ``MOURQD_WORKERS`` sets the evaluation thread count.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .config import PROFILES, load_config, read_config_json
from .core import read_solutions_csv
from .metrics import project_to_grid
from .plot import emit_plot
from .rng import Stream, generator
from .runner import canonical_grid, replay_metrics, run


def _cmd_run(args) -> int:
    cfg = load_config(args.config, profile=args.profile, seed=args.seed)
    out = Path(args.out or cfg.output_dir)
    result = run(cfg, out)
    last = result.metrics[-1]
    print(json.dumps({"out": str(out), "evaluations": result.evaluations,
                      "moqd_score": last.moqd_score, "coverage": last.coverage,
                      "archive_size": last.archive_size}))
    return 0


def _cmd_replay(args) -> int:
    recomputed, recorded = replay_metrics(args.run_dir)
    fields = ("moqd_score", "global_hypervolume", "coverage", "archive_size")
    diff = {f: (getattr(recomputed, f), getattr(recorded, f)) for f in fields
            if not math.isclose(getattr(recomputed, f), getattr(recorded, f), rel_tol=1e-12, abs_tol=1e-12)}
    print(json.dumps({"consistent": not diff, "iteration": recorded.iteration,
                      "mismatches": diff}))
    return 0 if not diff else 1


def _cmd_plot(args) -> int:
    run_dir = Path(args.run_dir)
    cfg = read_config_json(run_dir / "config.json")
    sols, _ = read_solutions_csv(run_dir / "archive.csv")
    grid = project_to_grid(sols, canonical_grid(cfg), generator(cfg.seed, Stream.PROJECTION, cfg.iterations))
    path = Path(args.out) if args.out else run_dir / "archive.svg"
    emit_plot(sols, grid, path, cfg.task_spec.reference_point)
    print(json.dumps({"plot": str(path)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mourqd", description="Multi-objective quality-diversity runs")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="execute one configured run")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--profile", choices=sorted(PROFILES))
    r.set_defaults(func=_cmd_run)
    rp = sub.add_parser("replay-metrics", help="recompute final metrics from the archive dump")
    rp.add_argument("run_dir")
    rp.set_defaults(func=_cmd_replay)
    pl = sub.add_parser("plot", help="write an SVG of the final archive")
    pl.add_argument("run_dir")
    pl.add_argument("--out")
    pl.set_defaults(func=_cmd_plot)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
