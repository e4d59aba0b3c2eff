"""Greedy aggregation: sort once, then sweep groups around starting points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import InvalidInput

SORT_KEYS = ("pca", "norm")


@dataclass(frozen=True)
class GAConfig:
    alpha: float
    sort_key: str = "pca"
    alpha_len: float | None = None
    alpha_inc: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidInput(f"alpha must be a positive finite number, got {self.alpha}")
        if self.sort_key not in SORT_KEYS:
            raise InvalidInput(f"sort_key must be one of {SORT_KEYS}, got {self.sort_key!r}")
        for a in (self.alpha_len, self.alpha_inc):
            if a is not None and not a > 0:
                raise InvalidInput("per-axis alphas must be positive")


def sort_keys(points, key: str = "pca") -> np.ndarray:
    """Scalar sort key per point.

    Both keys are 1-Lipschitz in the Euclidean distance, so a key gap larger
    than ``alpha`` proves the points are farther apart than ``alpha``.
    """
    centered = points - points.mean(axis=0)
    if key == "norm":
        return np.sqrt((centered ** 2).sum(axis=1))
    if centered.shape[1] == 1:
        return centered[:, 0].copy()
    _, vecs = np.linalg.eigh(centered.T @ centered)
    v = vecs[:, -1]
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return centered @ v


@njit(nogil=True, cache=True)
def _aggregate_kernel(pts, keys, alpha, stop_gap, early_stop):
    n, d = pts.shape
    labels = np.full(n, -1, np.int64)
    starts = np.empty(n, np.int64)
    alpha2 = alpha * alpha
    groups = 0
    for i in range(n):
        if labels[i] >= 0:
            continue
        labels[i] = groups
        starts[groups] = i
        for j in range(i + 1, n):
            if early_stop and keys[j] - keys[i] > stop_gap:
                break
            if labels[j] >= 0:
                continue
            acc = 0.0
            for c in range(d):
                diff = pts[j, c] - pts[i, c]
                acc += diff * diff
            if acc <= alpha2:
                labels[j] = groups
        groups += 1
    return labels, starts[:groups]


def greedy_aggregate(points, cfg: GAConfig | float, early_stop: bool = True):
    """Group points greedily in ascending sort-key order.

    The first unassigned point starts a group and collects every later
    unassigned point within ``alpha`` of it.

    Returns
    -------
    labels : (N,) int array, groups numbered in creation order
    starts : (k,) int array, index of each group's starting point
    centers : (k, d) float array, group means
    """
    if not isinstance(cfg, GAConfig):
        cfg = GAConfig(float(cfg))
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or len(points) == 0:
        raise InvalidInput("points must be a nonempty (N, d) array")
    keys = sort_keys(points, cfg.sort_key)
    order = np.argsort(keys, kind="stable")
    alpha = float(cfg.alpha)
    # rounding in the keys must never prune a pair that is within alpha
    stop_gap = alpha * (1 + 1e-12) + 1e-12 * float(np.abs(keys).max())
    sorted_labels, sorted_starts = _aggregate_kernel(
        np.ascontiguousarray(points[order]), np.ascontiguousarray(keys[order]),
        alpha, stop_gap, bool(early_stop))
    labels = np.empty_like(sorted_labels)
    labels[order] = sorted_labels
    k = len(sorted_starts)
    counts = np.bincount(labels, minlength=k)
    centers = np.column_stack([np.bincount(labels, weights=points[:, c], minlength=k)
                               for c in range(points.shape[1])]) / counts[:, None]
    return labels, order[sorted_starts], centers
