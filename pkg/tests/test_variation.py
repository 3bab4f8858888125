import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import sol
from mourqd.core import Bounds, Genome
from mourqd.variation import IsolineParams, isoline, select_parents

B = Bounds.box(-5, 5, 3)


def test_params_validation():
    with pytest.raises(ValueError):
        IsolineParams(-0.1, 0.05)
    with pytest.raises(ValueError):
        IsolineParams(0.01, np.inf)


def test_select_single():
    s = sol((1,), (0,))
    pairs = select_parents([s], 3, np.random.default_rng(0))
    assert len(pairs) == 3 and all(a is s and b is s for a, b in pairs)


def test_select_empty():
    with pytest.raises(ValueError):
        select_parents([], 3, np.random.default_rng(0))


def test_select_deterministic():
    pool = [sol((i,), (0,)) for i in range(100)]
    a = select_parents(pool, 256, np.random.default_rng(7))
    b = select_parents(pool, 256, np.random.default_rng(7))
    assert [(x.id, y.id) for x, y in a] == [(x.id, y.id) for x, y in b]


def test_select_uniform_chi_square():
    from scipy.stats import chisquare
    pool = [sol((i,), (0,)) for i in range(20)]
    pairs = select_parents(pool, 50_000, np.random.default_rng(1))
    counts = np.bincount([p.id - pool[0].id for pair in pairs for p in pair], minlength=20)
    assert counts.sum() == 100_000
    assert chisquare(counts).pvalue > 1e-3


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.integers(0, 2**32))
def test_degenerate_is_identity(p1, p2, seed):
    child = isoline(Genome(p1, B), Genome(p2, B), IsolineParams(0, 0), np.random.default_rng(seed))
    assert np.array_equal(child.values, np.array(p1))
    same = isoline(Genome(p1, B), Genome(p1, B), IsolineParams(0, 1.0), np.random.default_rng(seed))
    assert np.array_equal(same.values, np.array(p1))


def test_shared_line_scalar():
    b = Bounds.unbounded(2)
    child = isoline(Genome([0, 0], b), Genome([1, 1], b), IsolineParams(0, 1.0), np.random.default_rng(5))
    rng = np.random.default_rng(5)
    rng.standard_normal(2)
    zeta = rng.standard_normal()
    assert child.values[0] == child.values[1] == zeta


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.integers(0, 2**32))
def test_offspring_in_bounds(p, seed):
    child = isoline(Genome(p, B), Genome([5, -5, 5], B), IsolineParams(1.0, 3.0), np.random.default_rng(seed))
    assert B.contains(child.values)


def test_isoline_deterministic_and_length_check():
    g1, g2 = Genome([0, 1, 2], B), Genome([1, 1, 1], B)
    p = IsolineParams()
    a = isoline(g1, g2, p, np.random.default_rng(3))
    b = isoline(g1, g2, p, np.random.default_rng(3))
    assert np.array_equal(a.values, b.values)
    with pytest.raises(ValueError):
        isoline(g1, Genome([0.0], Bounds.box(0, 1, 1)), p, np.random.default_rng(0))
