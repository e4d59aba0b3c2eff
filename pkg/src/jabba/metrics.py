"""Reconstruction and clustering quality measures."""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.special import gammaln

from .core import TimeSeries
from .errors import InvalidInput


def _vals(x) -> np.ndarray:
    if isinstance(x, TimeSeries):
        return x.values
    return np.asarray(x, dtype=np.float64).ravel()


def mse(a, b) -> float:
    a, b = _vals(a), _vals(b)
    if len(a) != len(b):
        raise InvalidInput(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise InvalidInput("empty input")
    return float(np.mean((a - b) ** 2))


@njit(nogil=True, cache=True)
def _dtw_kernel(a, b):
    n, m = len(a), len(b)
    prev = np.full(m + 1, np.inf)
    prev[0] = 0.0
    cur = np.empty(m + 1)
    for i in range(1, n + 1):
        cur[0] = np.inf
        for j in range(1, m + 1):
            d = a[i - 1] - b[j - 1]
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = d * d + best
        prev, cur = cur, prev
    return prev[m]


def dtw(a, b) -> float:
    """Full-window dynamic time warping with squared pointwise cost, summed
    along the optimal monotone path."""
    a, b = _vals(a), _vals(b)
    if len(a) == 0 or len(b) == 0:
        raise InvalidInput("dtw needs nonempty inputs")
    return float(_dtw_kernel(np.ascontiguousarray(a), np.ascontiguousarray(b)))


def sse(points, labels, centers) -> float:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, points.shape[1])
    labels = np.asarray(labels)
    if len(labels) != len(points):
        raise InvalidInput("one label per point required")
    if len(labels) and (labels.min() < 0 or labels.max() >= len(centers)):
        raise InvalidInput("label out of range")
    return float(((points - centers[labels]) ** 2).sum())


def _entropy(counts, n) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def _expected_mi(a, b, n) -> float:
    """Expected mutual information of two labelings with marginals ``a`` and
    ``b`` under the hypergeometric (permutation) model."""
    emi = 0.0
    lg_n = gammaln(n + 1)
    for ai in a:
        for bj in b:
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if lo > hi:
                continue
            nij = np.arange(lo, hi + 1, dtype=np.float64)
            term = (nij / n) * (np.log(n * nij) - np.log(ai * bj))
            logp = (gammaln(ai + 1) + gammaln(bj + 1) + gammaln(n - ai + 1) + gammaln(n - bj + 1)
                    - lg_n - gammaln(nij + 1) - gammaln(ai - nij + 1) - gammaln(bj - nij + 1)
                    - gammaln(n - ai - bj + nij + 1))
            emi += float((term * np.exp(logp)).sum())
    return emi


def ami(labels_a, labels_b) -> float:
    """Adjusted mutual information, normalized by the larger entropy."""
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    if len(labels_a) != len(labels_b):
        raise InvalidInput("labelings differ in length")
    n = len(labels_a)
    if n == 0:
        raise InvalidInput("empty labelings")
    ua, ia = np.unique(labels_a, return_inverse=True)
    ub, ib = np.unique(labels_b, return_inverse=True)
    if len(ua) == len(ub) == 1:
        return 1.0
    if len(ua) == 1 or len(ub) == 1:
        return 0.0
    table = np.zeros((len(ua), len(ub)), dtype=np.float64)
    np.add.at(table, (ia, ib), 1)
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    nz = table > 0
    nij = table[nz]
    outer = np.outer(a, b)[nz]
    mi = float((nij / n * (np.log(nij * n) - np.log(outer))).sum())
    emi = _expected_mi(a.astype(np.int64), b.astype(np.int64), n)
    h = max(_entropy(a, n), _entropy(b, n))
    denom = h - emi
    eps = np.finfo(float).eps
    denom = min(denom, -eps) if denom < 0 else max(denom, eps)
    return float((mi - emi) / denom)


def speedup(runtimes: dict) -> dict:
    """Parallel speedup relative to the single-worker runtime."""
    if 1 not in runtimes:
        raise InvalidInput("speedup needs the 1-worker baseline runtime")
    base = runtimes[1]
    return {m: base / t for m, t in sorted(runtimes.items())}
