import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from conftest import key, sol
from mourqd.cli import main
from mourqd.config import ConfigError, from_mapping, load_config
from mourqd.core import Bounds, read_solutions_csv
from mourqd.grid import GridArchive, build_cvt
from mourqd.plot import PlotError, render_svg
from mourqd.rng import Stream, generator
from mourqd.runner import dump_archive, load_archive, replay_metrics, run
from mourqd.unstructured import UnstructuredArchive

ROOT = Path(__file__).resolve().parents[1]
SMALL = dict(iterations=12, batch_size=16, cvt_cells=16, max_front_size=3, cvt_samples=5000)


def small(task="rastrigin-2", container="mour-qd", **kw):
    return from_mapping({"task": task, "container": container, **SMALL, **kw})


def test_zero_iterations(tmp_path):
    result = run(small(iterations=0), tmp_path)
    lines = (tmp_path / "metrics.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("0,16,")
    assert result.evaluations == 16


@pytest.mark.parametrize("task,container", [
    ("rastrigin-2", "mour-qd"), ("rastrigin-3", "mome"), ("arm-2", "mome-small"),
    ("maze-2", "mour-qd"), ("maze-2", "mo-aurora-grid"), ("arm-uqd", "mour-qd"),
])
def test_runs_are_byte_identical(tmp_path, task, container):
    a, b = tmp_path / "a", tmp_path / "b"
    run(small(task, container, seed=4), a)
    run(small(task, container, seed=4), b, workers=3)
    for name in ("metrics.csv", "archive.csv", "archive.csv.json", "config.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    ma, mb = (json.loads((d / "manifest.json").read_text()) for d in (a, b))
    for k in ("started", "finished"):
        ma.pop(k), mb.pop(k)
    assert ma == mb


def test_seed_changes_output(tmp_path):
    run(small(seed=1), tmp_path / "a")
    run(small(seed=2), tmp_path / "b")
    assert (tmp_path / "a/archive.csv").read_bytes() != (tmp_path / "b/archive.csv").read_bytes()


def test_manifest_and_artifacts(tmp_path):
    run(small("maze-2"), tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["evaluations"] == 16 * 13 and m["evaluations_excluding_seed_batch"] == 16 * 12
    assert set(m["versions"]) >= {"mourqd", "numpy", "python"}
    assert (tmp_path / "encoder.json").exists()


def test_golden_rastrigin():
    golden = json.loads((ROOT / "tests/golden/rastrigin-2-mour-qd-seed1.json").read_text())
    cfg = load_config(ROOT / golden["config"], seed=golden["seed"])
    result = run(cfg)
    assert result.evaluations == golden["evaluations"]
    assert result.metrics[0].moqd_score == pytest.approx(golden["seeded_moqd_score"], rel=1e-9)
    assert result.metrics[-1].moqd_score == pytest.approx(golden["final_moqd_score"], rel=1e-9)
    assert result.metrics[-1].moqd_score > 1.5 * result.metrics[0].moqd_score


def test_container_parity_first_iteration():
    # both containers keep every globally non-dominated member of the identical seeded batch
    a = run(small(container="mour-qd", iterations=1))
    b = run(small(container="mome", iterations=1))
    assert a.metrics[0].global_hypervolume == b.metrics[0].global_hypervolume


def test_dump_round_trip(tmp_path):
    a = UnstructuredArchive(0.1, 100, 2, 2)
    rng = np.random.default_rng(0)
    a.add_batch([sol(rng.random(2), rng.random(2)) for _ in range(30)])
    dump_archive(a, tmp_path / "u.csv", 1)
    assert [key(s) for s in load_archive(tmp_path / "u.csv").solutions()] == [key(s) for s in a.solutions()]
    g = GridArchive(build_cvt(4, Bounds.box(0, 1, 2), 0, samples=1000), 2, 2)
    dump_archive(g, tmp_path / "g.csv", 1)
    assert len((tmp_path / "g.csv").read_text().splitlines()) == 1
    assert len(load_archive(tmp_path / "g.csv")) == 0


def test_large_dump_row_count(tmp_path):
    a = UnstructuredArchive(1e-6, 5120, 2, 1)
    rng = np.random.default_rng(1)
    a.add_batch([sol((1.0,), x) for x in rng.random((5120, 2))])
    assert len(a) == 5120
    dump_archive(a, tmp_path / "big.csv", 1)
    assert len((tmp_path / "big.csv").read_text().splitlines()) == 5121


def test_replay_consistency(tmp_path):
    run(small("arm-2", "mome-large"), tmp_path)
    recomputed, recorded = replay_metrics(tmp_path)
    assert recomputed == recorded


def test_plot_examples():
    g = GridArchive(build_cvt(4, Bounds.box(0, 1, 2), 0, samples=1000), 2, 2)
    empty = ET.fromstring(render_svg([], g, (0, 0)).split("\n", 1)[1])
    ns = "{http://www.w3.org/2000/svg}"
    assert empty.find(f"{ns}g[@id='axes']") is not None
    assert not list(empty.iter(f"{ns}circle"))
    s = sol((1, 1), (0.25, 0.75))
    root = ET.fromstring(render_svg([s], g, (0, 0)).split("\n", 1)[1])
    (c,) = root.iter(f"{ns}circle")
    # x maps [0, 1] onto [50, 430]; y is flipped
    assert float(c.get("cx")) == pytest.approx(50 + 0.25 * 380)
    assert float(c.get("cy")) == pytest.approx(430 - 0.75 * 380)
    g3 = GridArchive(build_cvt(4, Bounds.box(0, 1, 3), 0, samples=1000), 2, 2)
    with pytest.raises(PlotError):
        render_svg([], g3, (0, 0))


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="unknown config keys"):
        from_mapping({"task": "arm-2", "itrations": 5})
    with pytest.raises(ConfigError):
        from_mapping({"task": "arm-2", "iterations": "5"})
    with pytest.raises(ConfigError):
        from_mapping({"task": "arm-2", "capacity": 7, "profile": "desk"})
    with pytest.raises(ConfigError):
        from_mapping({"task": "nope"})
    with pytest.raises(ConfigError):
        from_mapping({"task": "arm-2", "batch_size": 0})


def test_profile_precedence():
    cfg = from_mapping({"task": "arm-2", "iterations": 7}, profile="desk")
    assert cfg.iterations == 7 and cfg.batch_size == 64 and cfg.capacity == 640
    assert cfg.target_size == 608


def test_rng_streams_independent():
    a = generator(1, Stream.SELECTION, 3).random(4)
    assert np.array_equal(a, generator(1, Stream.SELECTION, 3).random(4))
    assert not np.array_equal(a, generator(1, Stream.VARIATION, 3).random(4))
    assert not np.array_equal(a, generator(1, Stream.SELECTION, 4).random(4))


def test_cli_run_replay_plot(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('task = "arm-2"\ncontainer = "mour-qd"\niterations = 5\nbatch_size = 8\n'
                   'cvt_cells = 8\nmax_front_size = 2\ncvt_samples = 2000\n')
    out = tmp_path / "run"
    assert main(["run", str(cfg), "--seed", "3", "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["evaluations"] == 48
    assert main(["replay-metrics", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["consistent"] is True
    assert main(["plot", str(out)]) == 0
    ET.parse(out / "archive.svg")
    sols, _ = read_solutions_csv(out / "archive.csv")
    assert sum(1 for _ in ET.parse(out / "archive.svg").iter("{http://www.w3.org/2000/svg}circle")) == len(sols)


def test_cli_error_line(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('task = "arm-2"\nbogus = 1\n')
    proc = subprocess.run([sys.executable, "-m", "mourqd", "run", str(bad)], capture_output=True, text=True)
    assert proc.returncode != 0
    err = json.loads(proc.stderr.strip().splitlines()[-1])
    assert err["error"] == "ConfigError" and "bogus" in err["message"]


def test_l_local_invariant_under_size_control():
    """With size control, stored pairs never dominate within the smallest l used since the last rebuild."""
    from mourqd.features import RetrainSchedule
    cfg = small("maze-2", iterations=40, batch_size=32, seed=2)
    r = run(cfg)
    last = max(RetrainSchedule(cfg.iterations).triggers)
    radius = min(r.l_history[last:cfg.iterations])
    S = r.container.solutions()
    F = np.array([s.feature for s in S])
    Y = np.array([s.fitness for s in S])
    D = np.linalg.norm(F[:, None] - F[None], axis=2)
    dom = np.all(Y[:, None] >= Y[None], axis=2) & np.any(Y[:, None] > Y[None], axis=2)
    assert not np.any((D < radius) & dom)
