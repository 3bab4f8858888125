import numpy as np
import pytest

from conftest import sol
from mourqd.core import Bounds
from mourqd.grid import CvtTessellation, GridArchive, build_cvt
from mourqd.metrics import (MetricsRecord, MetricsWriter, coverage, front_hypervolume,
                            global_hypervolume, moqd_score, project_to_grid, qd_score, read_metrics)
from mourqd.pareto import hypervolume, mc_hypervolume_with_error
from mourqd.unstructured import UnstructuredArchive

UNIT = Bounds.box(0, 1, 2)


def one_cell(cap=10, m=2):
    return GridArchive(CvtTessellation(np.array([[0.5, 0.5]]), UNIT, 0), cap, m)


def tradeoffs(n):
    return [sol((i, n - i), (0.5, 0.5), hand=(0.4, 0.4)) for i in range(n)]


def test_projection_retains_all_under_cap():
    assert len(project_to_grid(tradeoffs(7), one_cell())) == 7


def test_projection_cap():
    assert len(project_to_grid(tradeoffs(11), one_cell())) == 10


def test_projection_uses_hand_feature():
    t = CvtTessellation(np.array([[0.0, 0.0], [1.0, 1.0]]), UNIT, 0)
    g = GridArchive(t, 5, 2)
    p = project_to_grid([sol((1, 1), (0.0, 0.0), hand=(0.9, 0.9))], g)
    assert p.occupied() == [1]
    with pytest.raises(ValueError):
        project_to_grid([sol((1, 1), (0.0, 0.0), hand=(0.9, 0.9, 0.9))], g)


def test_projection_idempotent(rng):
    t = build_cvt(16, UNIT, 0, samples=5000)
    g = GridArchive(t, 3, 2, np.random.default_rng(0))
    g.add_batch([sol(rng.random(2), rng.random(2)) for _ in range(300)])
    p = project_to_grid(g.solutions(), g)
    assert {c: sorted(s.id for s in v) for c, v in p.cells.items()} == \
        {c: sorted(s.id for s in v) for c, v in g.cells.items() if v}


def test_projection_never_increases_count(rng):
    a = UnstructuredArchive(0.02, 10_000, 2, 2)
    a.add_batch([sol(rng.random(2), rng.random(2)) for _ in range(500)])
    p = project_to_grid(a.solutions(), GridArchive(build_cvt(32, UNIT, 0, samples=5000), 3, 2))
    assert len(p) <= len(a)
    assert 0.0 <= coverage(p) <= 1.0


def test_moqd_examples(rng):
    g = one_cell()
    assert moqd_score(g, (0, 0)) == 0.0
    g.try_add(sol((2, 1), (0.5, 0.5)))
    assert moqd_score(g, (0, 0)) == 2.0

    t = build_cvt(6, UNIT, 0, samples=2000)
    g = GridArchive(t, 4, 2)
    g.add_batch([sol(rng.random(2), rng.random(2)) for _ in range(60)])
    total, var = 0.0, 0.0
    for c in g.occupied():
        est, se = mc_hypervolume_with_error(g.front(c), (0, 0), 200_000, c)
        total += est
        var += se**2
    assert abs(moqd_score(g, (0, 0)) - total) <= 3 * np.sqrt(var) + 1e-12


def test_global_hypervolume(rng):
    assert global_hypervolume([sol((2, 1), (0, 0))], (0, 0)) == 2.0
    assert global_hypervolume([], (0, 0)) == 0.0
    sols = [sol(rng.random(2), rng.random(2)) for _ in range(100)]
    t = build_cvt(8, UNIT, 0, samples=2000)
    g = project_to_grid(sols, GridArchive(t, 3, 2))
    gh = global_hypervolume(sols, (0, 0))
    assert gh >= max(hypervolume(g.front(c), (0, 0)) for c in g.occupied())
    est, se = mc_hypervolume_with_error(np.array([s.fitness for s in sols]), (0, 0), 500_000, 4)
    assert abs(gh - est) <= 3 * se + 1e-12


def test_coverage_examples():
    t = build_cvt(512, UNIT, 0)
    g = GridArchive(t, 1, 1)
    assert coverage(g) == 0.0
    for c in range(256):
        g.try_add(sol((1.0,), t.centroids[c]))
    assert coverage(g) == 0.5
    for c in range(256, 512):
        g.try_add(sol((1.0,), t.centroids[c]))
    assert coverage(g) == 1.0


def test_qd_score(rng):
    t = CvtTessellation(np.array([[0.0, 0.0], [1.0, 1.0]]), UNIT, 0)
    g = GridArchive(t, 1, 1)
    assert qd_score(g) == 0
    g.add_batch([sol((3,), (0.1, 0.1)), sol((4,), (0.9, 0.9))])
    assert qd_score(g) == 7
    t = build_cvt(20, UNIT, 0, samples=5000)
    g = GridArchive(t, 1, 1)
    g.add_batch([sol(rng.normal(size=1), rng.random(2)) for _ in range(500)])
    assert qd_score(g) == pytest.approx(sum(v[0].fitness[0] for v in g.cells.values()))
    with pytest.raises(ValueError):
        qd_score(one_cell())


def test_single_objective_hypervolume():
    assert front_hypervolume([[3.0], [1.0]], [0.5]) == 2.5
    assert front_hypervolume(np.zeros((0, 1)), [0.0]) == 0.0


def test_record_validation():
    with pytest.raises(ValueError):
        MetricsRecord(0, 0, 0.0, 0.0, 1.5, 0)


def test_writer_round_trip(tmp_path):
    w = MetricsWriter(tmp_path / "m.csv")
    recs = [MetricsRecord(0, 64, 1.5, 2.5, 0.25, 10, 0.03), MetricsRecord(10, 704, 3.0, 4.0, 0.5, 20)]
    for r in recs:
        w.append(r)
    assert read_metrics(tmp_path / "m.csv") == recs
    with pytest.raises(ValueError):
        w.append(MetricsRecord(20, 1, 0.0, 0.0, 0.0, 0))
