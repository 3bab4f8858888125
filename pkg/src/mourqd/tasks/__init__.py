"""Benchmark tasks and their registry.

=============  ==  =====================================  =====================
name           m   feature                                regime
=============  ==  =====================================  =====================
rastrigin-2    2   first two genes                        traditional
rastrigin-3    3   first two genes                        traditional
arm-2          2   end-effector position                  unknown feature bounds
maze-2         2   learned from an occupancy image        unsupervised
arm-uqd        2   mean end-effector over 16 noisy runs   uncertain evaluation
=============  ==  =====================================  =====================

Reference points sit 5% of the objective range below the analytic lower
bound of each objective.
"""
from __future__ import annotations

import functools
import math

import numpy as np

from ..core import Bounds
from .analytic import (ARM_LINKS, RASTRIGIN_DIM, arm_joints, eval_biobjective_rastrigin,
                       eval_planar_arm, eval_triobjective, rastrigin)
from .base import Task, TaskError, TaskSpec
from .maze import MazeWorld, eval_maze, eval_maze_batch, rollout
from .uncertain import REPLICATIONS, eval_uncertain

__all__ = [
    "Task", "TaskSpec", "TaskError", "MazeWorld", "get_task", "TASK_NAMES",
    "eval_biobjective_rastrigin", "eval_triobjective", "eval_planar_arm", "eval_maze",
    "eval_uncertain", "rastrigin", "arm_joints", "rollout",
]

# max over [-0.75, 0.75] of z^2 - 10 cos(2 pi z) is attained near |z| = 0.50255
RASTRIGIN_MIN = -202.51272990990114
RASTRIGIN_REF = -212.6383664053962
SPHERE_REF = -2.625
ARM_REF = (-1.05 * math.pi**2, -1.05 * 8 * math.pi)
MAZE_REF = (-148.49242404917499, -173.49242404917499)
ARM_UQD_NOISE = 0.05
# per-dimension std of 16 points on a disc of radius 8 is at most 8 * sqrt(16/15)
ARM_UQD_REF = (-(math.pi**2 + 8 * math.pi) * 1.05, -8 * math.sqrt(16 / 15) * 1.05)

_UNIT2 = Bounds.box(0.0, 1.0, 2)
_ARM_TRUE = Bounds.box(-8.0, 8.0, 2)
_ARM_SMALL = Bounds.box(-2.7, 2.7, 2)
_ARM_LARGE = Bounds.box(-10.7, 10.7, 2)


def _rastrigin2() -> Task:
    spec = TaskSpec("rastrigin-2", Bounds.box(0.0, 1.0, RASTRIGIN_DIM), 2, 2, _UNIT2,
                    (RASTRIGIN_REF, RASTRIGIN_REF), initial_l=0.03)
    return Task(spec, eval_biobjective_rastrigin)


def _rastrigin3() -> Task:
    spec = TaskSpec("rastrigin-3", Bounds.box(0.0, 1.0, RASTRIGIN_DIM), 3, 2, _UNIT2,
                    (RASTRIGIN_REF, RASTRIGIN_REF, SPHERE_REF), initial_l=0.05)
    return Task(spec, eval_triobjective)


def _arm() -> Task:
    spec = TaskSpec("arm-2", Bounds.box(-math.pi, math.pi, ARM_LINKS), 2, 2, _ARM_TRUE, ARM_REF,
                    initial_l=8.0 / 60.0, small_bounds=_ARM_SMALL, large_bounds=_ARM_LARGE)
    return Task(spec, eval_planar_arm)


def _maze() -> Task:
    spec = TaskSpec("maze-2", Bounds.box(-1.0, 1.0, 10), 2, 2, _UNIT2, MAZE_REF,
                    initial_l=0.01, csc_k=0.001, learned_features=True, latent_dim=4,
                    episode_length=100)
    return Task(spec, eval_maze, batch_fn=eval_maze_batch)


def _arm_uqd() -> Task:
    inner = _arm()
    spec = TaskSpec("arm-uqd", inner.spec.genome_bounds, 2, 2, _ARM_TRUE, ARM_UQD_REF,
                    initial_l=8.0 / 60.0, noise_scale=ARM_UQD_NOISE,
                    small_bounds=_ARM_SMALL, large_bounds=_ARM_LARGE)

    def fn(g, rng):
        return eval_uncertain(inner, g, REPLICATIONS, ARM_UQD_NOISE, rng)

    return Task(spec, fn, stochastic=True)


_FACTORIES = {
    "rastrigin-2": _rastrigin2,
    "rastrigin-3": _rastrigin3,
    "arm-2": _arm,
    "maze-2": _maze,
    "arm-uqd": _arm_uqd,
}
TASK_NAMES = tuple(_FACTORIES)


@functools.lru_cache(maxsize=None)
def get_task(name: str) -> Task:
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise TaskError(f"unknown task {name!r}; choose from {', '.join(TASK_NAMES)}") from None
