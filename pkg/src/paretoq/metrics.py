"""Pareto front quality indicators.

All metrics assume maximization in every objective and defensively filter
strictly dominated points out of their inputs first (a dominated input is a
caller bug and is reported as a warning, not an error). Hypervolume is exact
for two objectives via a sweep over the sorted front and Monte-Carlo
estimated for three or more; the Monte-Carlo estimator is also available
directly for any dimension, which gives an independent cross-check of the
exact sweep.
"""

from __future__ import annotations

import warnings

import numpy as np


def _validated_front(points, name: str = "front") -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(pts)):
        raise ValueError(f"{name} contains non-finite entries")
    # strictly dominated rows are dropped; exact duplicates are kept
    ge = np.all(pts[:, None, :] >= pts[None, :, :], axis=2)
    gt = np.any(pts[:, None, :] > pts[None, :, :], axis=2)
    dominated = np.any(ge & gt, axis=0)
    if np.any(dominated):
        warnings.warn(f"{name} contains {int(dominated.sum())} dominated point(s); "
                      "filtering them before computing the metric", stacklevel=3)
        pts = pts[~dominated]
    return pts


def _check_reference(front: np.ndarray, z_ref) -> np.ndarray:
    z = np.asarray(z_ref, dtype=float)
    if z.shape != (front.shape[1],):
        raise ValueError(f"reference point shape {z.shape} does not match front")
    if not np.all(front > z):
        raise ValueError(
            "invalid reference point: it must lie strictly below every front "
            "point in every objective")
    return z


def hypervolume(front, z_ref, samples: int = 10**6,
                rng: np.random.Generator | None = None) -> float:
    """Volume dominated by ``front`` and bounded below by ``z_ref``.

    Exact for two objectives; for three or more a Monte-Carlo estimate with
    ``samples`` draws is returned (see :func:`hypervolume_monte_carlo` for
    the standard error).
    """
    pts = _validated_front(front)
    z = _check_reference(pts, z_ref)
    if pts.shape[1] == 2:
        order = np.argsort(-pts[:, 0], kind="stable")
        pts = pts[order]
        hv = 0.0
        for i, (x, y) in enumerate(pts):
            next_x = pts[i + 1, 0] if i + 1 < len(pts) else z[0]
            hv += (x - next_x) * (y - z[1])
        return float(hv)
    return hypervolume_monte_carlo(front, z_ref, samples, rng)[0]


def hypervolume_monte_carlo(front, z_ref, samples: int = 10**6,
                            rng: np.random.Generator | None = None):
    """Monte-Carlo hypervolume estimate; returns ``(estimate, std_error)``.

    Points are drawn uniformly in the axis-aligned box spanned by ``z_ref``
    and the per-objective maxima of the front; the dominated fraction scales
    the box volume.
    """
    pts = _validated_front(front)
    z = _check_reference(pts, z_ref)
    if rng is None:
        rng = np.random.default_rng(0)
    upper = pts.max(axis=0)
    volume = float(np.prod(upper - z))
    if volume == 0.0:
        return 0.0, 0.0
    samples = int(samples)
    hits = 0
    chunk = max(1, min(samples, 10**8 // max(1, len(pts))))
    remaining = samples
    while remaining > 0:
        take = min(chunk, remaining)
        draws = z + rng.random((take, pts.shape[1])) * (upper - z)
        inside = np.ones((take, len(pts)), dtype=bool)
        for j in range(pts.shape[1]):
            inside &= draws[:, j, None] <= pts[None, :, j]
        hits += int(np.any(inside, axis=1).sum())
        remaining -= take
    frac = hits / samples
    estimate = volume * frac
    std_error = volume * float(np.sqrt(frac * (1.0 - frac) / samples))
    return estimate, std_error


def igd(front, reference_front) -> float:
    """Inverted generational distance from a reference front.

    ``(1/|Z|) * sqrt(sum_z min_v ||z - v||^2)`` with the square root taken
    outside the sum. Zero exactly when every reference point appears in the
    front. The reference front is taken verbatim: every one of its points
    contributes a distance, dominated or not.
    """
    pts = _validated_front(front)
    ref = np.atleast_2d(np.asarray(reference_front, dtype=float))
    if ref.size == 0 or not np.all(np.isfinite(ref)):
        raise ValueError("reference front must be non-empty and finite")
    if pts.shape[1] != ref.shape[1]:
        raise ValueError("front and reference front have different objective counts")
    sq = ((ref[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(sq.min(axis=1).sum()) / ref.shape[0])


def sparsity(front) -> float:
    """Average squared gap between consecutive front values per objective.

    Lower is denser. A single-point front has sparsity 0 by convention.
    """
    pts = _validated_front(front)
    n = pts.shape[0]
    if n == 1:
        return 0.0
    total = 0.0
    for j in range(pts.shape[1]):
        col = np.sort(pts[:, j])
        total += float(((col[1:] - col[:-1]) ** 2).sum())
    return total / (n - 1)


def expected_utility(front, weights) -> float:
    """Mean over the weight set of the best weighted-sum utility in the front."""
    pts = _validated_front(front)
    ws = np.atleast_2d(np.asarray(weights, dtype=float))
    if ws.size == 0:
        raise ValueError("weight set must be non-empty")
    if ws.shape[1] != pts.shape[1]:
        raise ValueError("weights and front have different objective counts")
    utilities = ws @ pts.T
    return float(utilities.max(axis=1).mean())
