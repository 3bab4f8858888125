"""Point-robot maze with a linear controller.

The robot starts at ``start`` and for ``T`` steps moves by ``0.02 * a_t`` with
``a_t = clip(W s_t + b, -1, 1)`` and ``s_t = (x_t, x_t - goal)``. A move that
would cross a wall is cut short just before the wall.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import DescriptorData, EvaluationResult
from .base import TaskError

GENOME_DIM = 10
EPISODE_LENGTH = 100
STEP_SIZE = 0.02
GOAL_RADIUS = 0.12
GOAL_BONUS = 5.0
IMAGE_SIDE = 8
# fraction of the way to a wall at which a blocked move stops
STOP_FRACTION = 0.99


@dataclass(frozen=True)
class MazeWorld:
    walls: np.ndarray  # (k, 4): x1 y1 x2 y2
    start: np.ndarray
    goal: np.ndarray
    goal_radius: float = GOAL_RADIUS

    @classmethod
    def from_file(cls, path) -> "MazeWorld":
        return cls.parse(Path(path).read_text())

    @classmethod
    def parse(cls, text: str) -> "MazeWorld":
        walls, start, goal = [], None, None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "start":
                    start = [float(v) for v in parts[1:3]]
                elif parts[0] == "goal":
                    goal = [float(v) for v in parts[1:3]]
                elif len(parts) == 4:
                    walls.append([float(v) for v in parts])
                else:
                    raise ValueError(line)
            except ValueError:
                raise ValueError(f"maze layout line {lineno} is malformed: {line!r}") from None
        if start is None or goal is None:
            raise ValueError("maze layout needs both a start and a goal line")
        return cls(np.array(walls).reshape(-1, 4), np.array(start), np.array(goal))

    def to_text(self) -> str:
        lines = [f"start {float(self.start[0])!r} {float(self.start[1])!r}",
                 f"goal {float(self.goal[0])!r} {float(self.goal[1])!r}"]
        lines += [" ".join(repr(float(v)) for v in w) for w in self.walls]
        return "\n".join(lines) + "\n"


def default_world() -> MazeWorld:
    text = resources.files("mourqd.tasks").joinpath("data/snake_maze.txt").read_text()
    return MazeWorld.parse(text)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def wall_hit_fraction(p: np.ndarray, delta: np.ndarray, walls: np.ndarray) -> np.ndarray:
    """Smallest fraction of ``delta`` at which each move meets a wall (inf if none).

    ``p`` and ``delta`` have shape ``(B, 2)``.
    """
    a = walls[None, :, :2]
    e = walls[None, :, 2:] - walls[None, :, :2]
    d = delta[:, None, :]
    ap = a - p[:, None, :]
    denom = _cross(d, e)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(ap, e) / denom
        u = _cross(ap, d) / denom
    hit = (denom != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
    return np.where(hit, t, np.inf).min(axis=1, initial=np.inf)


def occupancy_image(pos: np.ndarray, side: int = IMAGE_SIDE) -> np.ndarray:
    """Soft occupancy of each position on a ``side`` x ``side`` grid, flattened row-major.

    Each pixel holds a Gaussian weight of its centre's distance to the robot,
    with a width of one pixel.
    """
    pos = np.atleast_2d(pos)
    centres = (np.arange(side) + 0.5) / side
    sigma = 1.0 / side
    wy = np.exp(-((pos[:, 1:2] - centres[None, :]) ** 2) / (2 * sigma**2))
    wx = np.exp(-((pos[:, 0:1] - centres[None, :]) ** 2) / (2 * sigma**2))
    return (wy[:, :, None] * wx[:, None, :]).reshape(len(pos), -1)


def rollout(G: np.ndarray, world: MazeWorld, steps: int = EPISODE_LENGTH,
            record: bool = False):
    """Simulate every controller in ``G`` (shape ``(B, 10)``).

    Returns ``(energy, goal_reward, final_positions)`` and, with ``record``,
    the ``(steps + 1, B, 2)`` position history.
    """
    G = np.asarray(G, dtype=np.float64)
    if G.ndim != 2 or G.shape[1] != GENOME_DIM:
        raise TaskError(f"maze expects genomes of length {GENOME_DIM}, got shape {G.shape}")
    B = len(G)
    W = G[:, :8].reshape(B, 2, 4)
    b = G[:, 8:]
    pos = np.tile(world.start, (B, 1))
    energy = np.zeros(B)
    reward = np.zeros(B)
    history = [pos.copy()] if record else None
    for _ in range(steps):
        state = np.concatenate([pos, pos - world.goal], axis=1)
        action = np.clip(np.einsum("bij,bj->bi", W, state) + b, -1.0, 1.0)
        energy -= np.sqrt(np.sum(action**2, axis=1))
        delta = STEP_SIZE * action
        t_hit = wall_hit_fraction(pos, delta, world.walls)
        frac = np.where(np.isfinite(t_hit), STOP_FRACTION * t_hit, 1.0)
        pos = pos + frac[:, None] * delta
        dist = np.sqrt(np.sum((pos - world.goal) ** 2, axis=1))
        reward += np.where(dist > world.goal_radius, -dist, GOAL_BONUS)
        if record:
            history.append(pos.copy())
    if record:
        return energy, reward, pos, np.array(history)
    return energy, reward, pos


def eval_maze_batch(G, world: Optional[MazeWorld] = None) -> list[EvaluationResult]:
    world = world or _WORLD
    energy, reward, final = rollout(G, world)
    images = occupancy_image(final)
    return [
        EvaluationResult([e, r], DescriptorData(img, f"image:{IMAGE_SIDE}x{IMAGE_SIDE}"), p)
        for e, r, p, img in zip(energy, reward, final, images)
    ]


def eval_maze(g, world: Optional[MazeWorld] = None) -> EvaluationResult:
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if g.size != GENOME_DIM:
        raise TaskError(f"maze expects a genome of length {GENOME_DIM}, got {g.size}")
    return eval_maze_batch(g[None, :], world)[0]


_WORLD = default_world()
