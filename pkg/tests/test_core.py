import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import key
from mourqd.core import (Bounds, DescriptorData, EvaluationError, Genome, IdCounter, Solution,
                         clip_genome, read_solutions_csv, write_solutions_csv)


def test_clip_upper():
    g = Genome([1.3, 0.5], Bounds.box(0, 1, 2))
    assert clip_genome(g).values.tolist() == [1.0, 0.5]


def test_clip_identity():
    g = Genome([0.2, 0.8], Bounds.box(0, 1, 2))
    assert clip_genome(g).values.tolist() == [0.2, 0.8]


def test_clip_lower():
    assert clip_genome(Genome([-0.1], Bounds.box(0, 1, 1))).values.tolist() == [0.0]


def test_unbounded_coordinates_untouched():
    b = Bounds([0.0, -np.inf], [1.0, np.inf])
    assert clip_genome(Genome([5.0, -1e6], b)).values.tolist() == [1.0, -1e6]


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8))
def test_clip_idempotent(vals):
    b = Bounds.box(-1.0, 2.0, len(vals))
    once = clip_genome(Genome(vals, b))
    assert np.array_equal(clip_genome(once).values, once.values)
    assert b.contains(once.values)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_solution_rejects_non_finite(bad):
    with pytest.raises(EvaluationError):
        Solution(0, [0.0], [1.0, bad], [0.0])
    with pytest.raises(EvaluationError):
        Solution(0, [0.0], [1.0], [bad])


def test_empty_fitness_rejected():
    with pytest.raises(ValueError):
        Solution(0, [0.0], [], [0.0])


def test_hand_feature_defaults_to_feature():
    s = Solution(3, [0.1], [1.0], [0.4, 0.6])
    assert np.array_equal(s.hand_feature, s.feature)
    t = s.with_feature([9.0])
    assert t.feature.tolist() == [9.0] and t.hand_feature.tolist() == [0.4, 0.6]


def test_arrays_are_read_only():
    s = Solution(0, [0.0], [1.0], [0.0])
    with pytest.raises(ValueError):
        s.fitness[0] = 2.0


def test_descriptor_validation():
    assert DescriptorData([1.0, 2.0], "x").raw.shape == (1, 2)
    with pytest.raises(ValueError):
        DescriptorData(np.zeros((0, 3)), "x")


def test_id_counter_monotone():
    c = IdCounter()
    assert [c(), c(), c()] == [0, 1, 2]


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    sols = [Solution(i, rng.random(3), rng.normal(size=2), rng.random(2), rng.random(2) * 5)
            for i in range(20)]
    path = tmp_path / "a.csv"
    write_solutions_csv(path, sols, (3, 2, 2), extra_columns={"tag": list(range(20))})
    back, extras = read_solutions_csv(path)
    assert [key(s) for s in back] == [key(s) for s in sols]
    assert extras["tag"] == [str(i) for i in range(20)]


def test_csv_empty_is_header_only(tmp_path):
    path = tmp_path / "e.csv"
    write_solutions_csv(path, [], (2, 2, 1))
    lines = path.read_text().splitlines()
    assert lines == ["id,genome_0,genome_1,fitness_0,fitness_1,feature_0,hand_feature_0"]
