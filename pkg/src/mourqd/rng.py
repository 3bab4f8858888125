"""Counter-based random streams keyed by (master seed, stream id, counter...).

Each consumer asks for a generator addressed by a fixed stream id plus
integer counters such as the iteration and pair index. Streams never share
state, so the draws one consumer sees do not depend on how many draws any
other consumer made, or in what order parallel workers ran.
"""
from __future__ import annotations

import enum

import numpy as np


class Stream(enum.IntEnum):
    INIT = 1
    SELECTION = 2
    VARIATION = 3
    TASK_NOISE = 4
    GRID_EVICTION = 5
    PROJECTION = 6


def philox_key(seed: int, stream: int, *counters: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream), *map(int, counters)))
    return ss.generate_state(2, dtype=np.uint64)


def generator(seed: int, stream: int, *counters: int) -> np.random.Generator:
    """A fresh Philox generator for the given address."""
    return np.random.Generator(np.random.Philox(key=philox_key(seed, stream, *counters)))
