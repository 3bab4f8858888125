import itertools

import numpy as np
import pytest

from mourqd.core import Solution

_ids = itertools.count(10_000)


def sol(fitness, feature, id=None, genome=(0.0,), hand=None):
    """Small factory for hand-built solutions."""
    return Solution(next(_ids) if id is None else id, list(genome), list(fitness), list(feature), hand)


def brute_front(points):
    """O(n^2) oracle: non-dominated points, duplicates kept once (first seen)."""
    pts = [tuple(map(float, p)) for p in points]
    out = []
    for i, p in enumerate(pts):
        dominated = any(all(a >= b for a, b in zip(q, p)) and any(a > b for a, b in zip(q, p))
                        for q in pts)
        if not dominated and p not in out:
            out.append(p)
    return sorted(out)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def key(s):
    """Hashable, exact view of a solution for equality checks."""
    return (s.id, tuple(s.genome), tuple(s.fitness), tuple(s.feature), tuple(s.hand_feature))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
