"""Vector quantization back-ends: D^2 seeding, k-means++ and sampling k-means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import InvalidInput, InvalidK, InvalidR


@dataclass(frozen=True)
class VQConfig:
    k: int
    r: float = 1.0
    max_iters: int = 300
    n_init: int = 1
    seed: int | None = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidK(f"k must be a positive integer, got {self.k}")
        if not 0 < self.r <= 1:
            raise InvalidR(f"r must lie in (0, 1], got {self.r}")
        if self.max_iters < 1 or self.n_init < 1:
            raise InvalidInput("max_iters and n_init must be positive")


@njit(nogil=True, cache=True)
def _nearest(points, centers):
    n, d = points.shape
    k = centers.shape[0]
    labels = np.empty(n, np.int64)
    dist2 = np.empty(n, np.float64)
    for i in range(n):
        best = np.inf
        arg = 0
        for j in range(k):
            acc = 0.0
            for c in range(d):
                diff = points[i, c] - centers[j, c]
                acc += diff * diff
            if acc < best:
                best = acc
                arg = j
        labels[i] = arg
        dist2[i] = best
    return labels, dist2


@njit(nogil=True, cache=True)
def _dist(points, i, centers, j):
    acc = 0.0
    for c in range(points.shape[1]):
        diff = points[i, c] - centers[j, c]
        acc += diff * diff
    return np.sqrt(acc)


@njit(nogil=True, cache=True)
def _lloyd_bounded(points, labels, centers, max_iters, slack):
    """Lloyd sweeps that skip points whose assignment provably cannot change.

    Keeps an upper bound on the distance to the assigned center and a lower
    bound on the distance to every other one.  ``labels`` must be exact
    nearest-center labels for ``centers`` on entry.  Status: 0 converged,
    1 a cluster emptied, 2 out of iterations.
    """
    n, d = points.shape
    k = centers.shape[0]
    labels = labels.copy()
    centers = centers.copy()
    upper = np.empty(n)
    lower = np.empty(n)
    for i in range(n):
        best = np.inf
        second = np.inf
        for j in range(k):
            dj = _dist(points, i, centers, j)
            if j == labels[i]:
                best = dj
            elif dj < second:
                second = dj
        upper[i] = best
        lower[i] = second
    history = np.empty(max_iters)
    shift = np.empty(k)
    half_gap = np.empty(k)
    for it in range(max_iters):
        counts = np.zeros(k, np.int64)
        sums = np.zeros((k, d))
        for i in range(n):
            counts[labels[i]] += 1
            for c in range(d):
                sums[labels[i], c] += points[i, c]
        for j in range(k):
            if counts[j] == 0:
                return labels, centers, history[:it], 1
        max_shift = 0.0
        for j in range(k):
            acc = 0.0
            for c in range(d):
                v = sums[j, c] / counts[j]
                diff = v - centers[j, c]
                acc += diff * diff
                centers[j, c] = v
            shift[j] = np.sqrt(acc)
            if shift[j] > max_shift:
                max_shift = shift[j]
        for j in range(k):
            g = np.inf
            for j2 in range(k):
                if j2 != j:
                    dj = _dist(centers, j, centers, j2)
                    if dj < g:
                        g = dj
            half_gap[j] = 0.5 * g
        changed = 0
        for i in range(n):
            a = labels[i]
            upper[i] += shift[a]
            lower[i] -= max_shift
            limit = max(half_gap[a], lower[i])
            if upper[i] + slack < limit:
                continue
            upper[i] = _dist(points, i, centers, a)
            if upper[i] + slack < limit:
                continue
            best = np.inf
            second = np.inf
            arg = 0
            for j in range(k):
                dj = _dist(points, i, centers, j)
                if dj < best:
                    second = best
                    best = dj
                    arg = j
                elif dj < second:
                    second = dj
            upper[i] = best
            lower[i] = second
            if arg != a:
                labels[i] = arg
                changed += 1
        sse = 0.0
        for i in range(n):
            for c in range(d):
                diff = points[i, c] - centers[labels[i], c]
                sse += diff * diff
        history[it] = sse
        if changed == 0:
            return labels, centers, history[:it + 1], 0
    return labels, centers, history, 2


def nearest_center(points, centers) -> tuple[np.ndarray, np.ndarray]:
    """Index of the closest center for every point (ties go to the lowest index)
    and the squared distance to it."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if centers.ndim == 1:
        centers = centers[:, None]
    return _nearest(points, centers)


def _as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or len(points) == 0:
        raise InvalidInput("points must be a nonempty (N, d) array")
    return points


def d2_seed(points, k: int, rng=None, return_index: bool = False):
    """Pick ``k`` distinct initial centers by D^2 weighting.

    The first center is uniform; each further one is drawn with probability
    proportional to the squared distance to the nearest center already chosen.
    Once every remaining point coincides with a center, the rest are drawn
    uniformly among unchosen points.
    """
    points = _as_points(points)
    n = len(points)
    if k < 1 or k > n:
        raise InvalidK(f"k={k} must lie in [1, {n}]")
    rng = np.random.default_rng(rng)
    chosen = np.empty(k, np.int64)
    chosen[0] = rng.integers(n)
    d2 = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    taken = np.zeros(n, bool)
    taken[chosen[0]] = True
    for i in range(1, k):
        cum = np.cumsum(d2)
        total = cum[-1]
        if total > 0:
            idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
            if idx >= n:
                idx = int(np.flatnonzero(d2 > 0)[-1])
        else:
            free = np.flatnonzero(~taken)
            idx = int(free[rng.integers(len(free))])
        chosen[i] = idx
        taken[idx] = True
        np.minimum(d2, ((points - points[idx]) ** 2).sum(axis=1), out=d2)
        d2[taken] = 0.0
    centers = points[chosen].copy()
    return (centers, chosen) if return_index else centers


def cluster_means(points, labels, k, dist2=None):
    """Mean of each cluster.  Empty clusters are re-seeded with the point
    farthest from its current center (``dist2``), which is moved into them."""
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k)
    if np.any(counts == 0):
        if dist2 is None:
            dist2 = np.zeros(len(points))
        dist2 = dist2.copy()
        for j in np.flatnonzero(counts == 0):
            donors = np.flatnonzero(counts[labels] > 1)
            if len(donors) == 0:
                raise InvalidK("fewer points than clusters")
            idx = donors[np.argmax(dist2[donors])]
            counts[labels[idx]] -= 1
            labels[idx] = j
            counts[j] = 1
            dist2[idx] = 0.0
    sums = np.column_stack([np.bincount(labels, weights=points[:, c], minlength=k)
                            for c in range(points.shape[1])])
    return sums / counts[:, None], labels


def lloyd(points, centers, max_iters: int = 300):
    """Lloyd iterations from the given centers.

    Returns ``(labels, centers, sse_history)``.  On return the centers are the
    means of the returned clusters; the labels are also nearest-center labels
    unless ``max_iters`` ran out first.
    """
    points = _as_points(points)
    centers = np.asarray(centers, dtype=np.float64).reshape(len(centers), points.shape[1])
    k = len(centers)
    labels, dist2 = nearest_center(points, centers)
    history = [float(dist2.sum())]
    # absolute slack absorbs rounding drift of the incremental distance bounds
    slack = 1e-9 * (float(np.abs(points).max()) + 1.0)
    remaining = max_iters
    while remaining > 0:
        labels, _, hist, status = _lloyd_bounded(points, labels, centers, remaining, slack)
        history.extend(hist.tolist())
        remaining -= max(len(hist), 1)
        if status == 1:
            dist2 = ((points - centers[labels]) ** 2).sum(axis=1)
        centers, labels = cluster_means(points, labels, k, dist2)
        # exact check: the bounded sweeps may only skip provably unchanged points
        new_labels, dist2 = nearest_center(points, centers)
        if status != 1 and np.array_equal(new_labels, labels):
            break
        labels = new_labels
    else:
        centers, labels = cluster_means(points, labels, k, dist2)
    return labels, centers, history


def _sse(points, labels, centers) -> float:
    return float(((points - centers[labels]) ** 2).sum())


def kmeans(points, cfg: VQConfig):
    """k-means++: D^2 seeding followed by Lloyd iterations.

    Keeps the restart with the lowest SSE among ``cfg.n_init``.
    Returns ``(labels, centers)``.
    """
    points = _as_points(points)
    if cfg.k > len(points):
        raise InvalidK(f"k={cfg.k} exceeds the number of points ({len(points)})")
    rng = np.random.default_rng(cfg.seed)
    best = None
    for _ in range(cfg.n_init):
        seeds = d2_seed(points, cfg.k, rng)
        labels, centers, _ = lloyd(points, seeds, cfg.max_iters)
        cost = _sse(points, labels, centers)
        if best is None or cost < best[0]:
            best = (cost, labels, centers)
    return best[1], best[2]


def sampling_kmeans(points, cfg: VQConfig):
    """k-means++ fitted on a uniform sample of ``round(r * N)`` points; every
    point is then labeled by its nearest resulting center.

    Returns ``(labels, centers)`` where centers come from the sample.
    """
    points = _as_points(points)
    n = len(points)
    size = int(np.floor(cfg.r * n + 0.5))
    if size < cfg.k:
        raise InvalidR(f"sample of {size} points (r={cfg.r}) is smaller than k={cfg.k}")
    rng = np.random.default_rng(cfg.seed)
    if size == n:
        sample = points
    else:
        sample = points[rng.choice(n, size=size, replace=False)]
    inner = VQConfig(cfg.k, 1.0, cfg.max_iters, cfg.n_init, int(rng.integers(2**63)))
    _, centers = kmeans(sample, inner)
    labels, _ = nearest_center(points, centers)
    return labels, centers
