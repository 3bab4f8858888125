"""Closed-form benchmark tasks on the unit hypercube and the planar arm."""
from __future__ import annotations

import numpy as np

from ..core import DescriptorData, EvaluationResult
from .base import check_length

RASTRIGIN_DIM = 10
ARM_LINKS = 8


def rastrigin(z) -> float:
    z = np.asarray(z, dtype=np.float64)
    return float(10.0 * z.size + np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z)))


def _rastrigin_pair(g: np.ndarray) -> list[float]:
    return [-rastrigin(g - 0.25), -rastrigin(g - 0.75)]


def eval_biobjective_rastrigin(g) -> EvaluationResult:
    """Two shifted Rastrigin objectives with optima at 0.25 and 0.75 in every gene."""
    g = check_length(g, RASTRIGIN_DIM, "rastrigin-2")
    return EvaluationResult(_rastrigin_pair(g), DescriptorData(g, "genome"), g[:2])


def eval_triobjective(g) -> EvaluationResult:
    """The two Rastrigin objectives plus a sphere centred on 0.5."""
    g = check_length(g, RASTRIGIN_DIM, "rastrigin-3")
    f3 = -float(np.sum((g - 0.5) ** 2))
    return EvaluationResult(_rastrigin_pair(g) + [f3], DescriptorData(g, "genome"), g[:2])


def arm_joints(angles) -> np.ndarray:
    """Joint positions (links of length 1) after each link, shape ``(links, 2)``."""
    cum = np.cumsum(angles)
    return np.cumsum(np.stack([np.cos(cum), np.sin(cum)], axis=1), axis=0)


def eval_planar_arm(g) -> EvaluationResult:
    """8-link planar arm; the feature is the end-effector position.

    Objectives reward smooth (low-variance) and small joint angles.
    """
    g = check_length(g, ARM_LINKS, "arm-2")
    joints = arm_joints(g)
    fitness = [-float(np.var(g)), -float(np.sum(np.abs(g)))]
    return EvaluationResult(fitness, DescriptorData(joints, "trajectory"), joints[-1])
