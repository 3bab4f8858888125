"""Standalone SVG scatter of an archive in a 2-D feature space.

Every solution is drawn at its hand feature and coloured by the hypervolume
of the grid cell containing it, using a five-stop viridis ramp.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import Solution
from .grid import GridArchive, assign_cell
from .metrics import front_hypervolume

WIDTH = HEIGHT = 480
MARGIN = 50
RADIUS = 3
VIRIDIS = np.array([(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)], float)


class PlotError(ValueError):
    pass


def _colour(t: float) -> str:
    t = min(max(t, 0.0), 1.0) * (len(VIRIDIS) - 1)
    i = min(int(t), len(VIRIDIS) - 2)
    rgb = VIRIDIS[i] + (t - i) * (VIRIDIS[i + 1] - VIRIDIS[i])
    return "#" + "".join(f"{int(round(c)):02x}" for c in rgb)


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_svg(solutions: Sequence[Solution], grid: GridArchive, ref) -> str:
    if grid.feature_dim != 2:
        raise PlotError(f"plots need a 2-D feature space, got d={grid.feature_dim}")
    pts = np.array([s.hand_feature for s in solutions]).reshape(-1, 2)
    if pts.size and pts.shape[1] != 2:
        raise PlotError("plots need 2-D features")
    lo = grid.tessellation.bounds.low.copy()
    hi = grid.tessellation.bounds.high.copy()
    if len(pts):
        lo = np.minimum(lo, pts.min(axis=0))
        hi = np.maximum(hi, pts.max(axis=0))
    span = np.where(hi > lo, hi - lo, 1.0)
    inner = WIDTH - 2 * MARGIN

    def to_px(p):
        x = MARGIN + (p[0] - lo[0]) / span[0] * inner
        y = HEIGHT - MARGIN - (p[1] - lo[1]) / span[1] * inner
        return x, y

    hv = {c: front_hypervolume(grid.front(c), ref) for c in grid.occupied()}
    top = max(hv.values(), default=0.0)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<!-- colour: cell hypervolume mapped linearly from 0 to {_fmt(top)} onto "
        "viridis (purple low, yellow high); cell lookup by nearest centroid -->",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}"/>'
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}"/></g>',
        f'<g id="labels" font-family="sans-serif" font-size="11">'
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}">{_fmt(lo[0])}</text>'
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" text-anchor="end">{_fmt(hi[0])}</text>'
        f'<text x="{MARGIN - 6}" y="{HEIGHT - MARGIN}" text-anchor="end">{_fmt(lo[1])}</text>'
        f'<text x="{MARGIN - 6}" y="{MARGIN + 4}" text-anchor="end">{_fmt(hi[1])}</text>'
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">feature 0</text>'
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">feature 1</text></g>',
        '<g id="solutions" stroke="none">',
    ]
    for s, p in zip(solutions, pts):
        cell = assign_cell(grid.tessellation, p)
        t = hv.get(cell, 0.0) / top if top > 0 else 0.0
        x, y = to_px(p)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{RADIUS}" fill="{_colour(t)}">'
                   f"<title>id {s.id}</title></circle>")
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def emit_plot(solutions: Sequence[Solution], grid: GridArchive, path, ref) -> None:
    with open(path, "w") as fh:
        fh.write(render_svg(solutions, grid, ref))
