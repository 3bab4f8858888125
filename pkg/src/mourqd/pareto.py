"""Pareto dominance, front extraction and hypervolume (maximisation convention).

All objectives are maximised. A point ``a`` dominates ``b`` when it is at
least as good everywhere and strictly better somewhere. Exact hypervolume is
provided for two and three objectives; :func:`mc_hypervolume` is an
independent Monte-Carlo estimate used to check it.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "UnsupportedDimensionError",
    "dominates",
    "nondominated_indices",
    "extract_front",
    "hypervolume",
    "mc_hypervolume",
    "mc_hypervolume_with_error",
]

_CHUNK = 256


class UnsupportedDimensionError(ValueError):
    pass


def dominates(a, b) -> bool:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a >= b) and np.any(a > b))


def _as_points(points, m=None) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        width = m if m is not None else (pts.shape[-1] if pts.ndim == 2 else 0)
        return np.empty((0, width))
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2:
        raise ValueError("points must be a list of equal-length vectors")
    return pts


def nondominated_indices(points) -> np.ndarray:
    """Indices of the non-dominated points, one representative per duplicate.

    The representative of a group of identical vectors is its first occurrence,
    and the returned indices are in input order.
    """
    pts = _as_points(points)
    n = len(pts)
    if n == 0:
        return np.empty(0, dtype=np.intp)
    dominated = np.zeros(n, dtype=bool)
    duplicate = np.zeros(n, dtype=bool)
    for start in range(0, n, _CHUNK):
        blk = pts[start:start + _CHUNK]
        ge = np.all(blk[:, None, :] >= pts[None, :, :], axis=2)
        gt = np.any(blk[:, None, :] > pts[None, :, :], axis=2)
        dominated |= np.any(ge & gt, axis=0)
        # eq[i, j]: blk row i equals point j; j is a duplicate if some earlier i matches
        eq = ge & ~gt
        rows = np.arange(start, start + len(blk))[:, None]
        duplicate |= np.any(eq & (rows < np.arange(n)[None, :]), axis=0)
    return np.flatnonzero(~dominated & ~duplicate)


def extract_front(points) -> np.ndarray:
    """Return the non-dominated subset of ``points`` as a ``(k, m)`` array."""
    pts = _as_points(points)
    return pts[nondominated_indices(pts)]


def _hv2d(front: np.ndarray, ref: np.ndarray) -> float:
    # sweep by descending first objective; second objective rises along a front
    order = np.lexsort((-front[:, 1], -front[:, 0]))
    total = 0.0
    best_y = ref[1]
    for x, y in front[order]:
        if y > best_y:
            total += (x - ref[0]) * (y - best_y)
            best_y = y
    return total


def _hv3d(front: np.ndarray, ref: np.ndarray) -> float:
    order = np.argsort(-front[:, 2], kind="stable")
    pts = front[order]
    total = 0.0
    layer = np.empty((0, 2))
    for k in range(len(pts)):
        layer = np.vstack([layer, pts[k, :2]])
        z_hi = pts[k, 2]
        z_lo = pts[k + 1, 2] if k + 1 < len(pts) else ref[2]
        if z_hi > z_lo:
            layer = extract_front(layer)
            total += _hv2d(layer, ref[:2]) * (z_hi - z_lo)
    return total


def hypervolume(front, ref) -> float:
    """Exact volume of objective space dominated by ``front`` and above ``ref``.

    Members that do not strictly dominate ``ref`` in every coordinate are
    dropped first. Supports two or three objectives.
    """
    ref = np.asarray(ref, dtype=np.float64).reshape(-1)
    m = ref.size
    if m not in (2, 3):
        raise UnsupportedDimensionError(f"hypervolume supports m in {{2, 3}}, got m={m}")
    pts = _as_points(front, m)
    if len(pts) == 0:
        return 0.0
    if pts.shape[1] != m:
        raise ValueError(f"front has {pts.shape[1]} objectives, reference point has {m}")
    pts = pts[np.all(pts > ref, axis=1)]
    if len(pts) == 0:
        return 0.0
    pts = extract_front(pts)
    if m == 2:
        return float(_hv2d(pts, ref))
    return float(_hv3d(pts, ref))


def mc_hypervolume_with_error(front, ref, samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo hypervolume estimate and its standard error.

    Points are drawn uniformly in the box spanned by ``ref`` and the
    componentwise maximum of the front.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    ref = np.asarray(ref, dtype=np.float64).reshape(-1)
    pts = _as_points(front, ref.size)
    if len(pts) == 0:
        return 0.0, 0.0
    pts = pts[np.all(pts > ref, axis=1)]
    if len(pts) == 0:
        return 0.0, 0.0
    hi = pts.max(axis=0)
    volume = float(np.prod(hi - ref))
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    while remaining:
        n = min(remaining, 100_000)
        u = rng.uniform(ref, hi, size=(n, ref.size))
        covered = np.zeros(n, dtype=bool)
        for p in pts:
            covered |= np.all(u <= p, axis=1)
        hits += int(covered.sum())
        remaining -= n
    frac = hits / samples
    return volume * frac, volume * np.sqrt(frac * (1.0 - frac) / samples)


def mc_hypervolume(front, ref, samples: int, seed: int) -> float:
    return mc_hypervolume_with_error(front, ref, samples, seed)[0]
