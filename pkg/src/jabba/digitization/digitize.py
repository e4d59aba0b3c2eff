"""Turn (len, inc) pieces into symbols with a shared codebook."""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite

import numpy as np

from ..compression import PartitionedPieces
from ..core import Codebook, PieceSequence, ScalingParams, SymbolicResult, make_symbols
from ..errors import InvalidInput
from .aggregation import GAConfig, greedy_aggregate
from .vq import VQConfig, cluster_means, kmeans, lloyd, nearest_center, sampling_kmeans

BACKENDS = ("vq", "sampling-vq", "ga", "ga-auto", "ga-hierarchical")
ALIASES = {"svq": "sampling-vq", "ga-hier": "ga-hierarchical", "kmeans": "vq"}


@dataclass(frozen=True)
class AutoDigitizeConfig:
    eta: float = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise InvalidInput("eta must be positive")


def _std(x: np.ndarray) -> float:
    if len(x) < 2:
        return 1.0
    s = float(np.std(x, ddof=1))
    return s if s > 0 and isfinite(s) else 1.0


def _lens_incs(pieces):
    if isinstance(pieces, (PartitionedPieces, PieceSequence)):
        return pieces.lens.astype(np.float64), np.asarray(pieces.incs, dtype=np.float64)
    if isinstance(pieces, (list, tuple)) and pieces and isinstance(pieces[0], PieceSequence):
        return (np.concatenate([p.lens for p in pieces]).astype(np.float64),
                np.concatenate([p.incs for p in pieces]))
    arr = np.asarray(pieces, dtype=np.float64).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def scale_pieces(pieces, scl: float = 1.0):
    """Normalize lens and incs by their standard deviations and weight lens by ``scl``.

    A degenerate (zero or undefined) deviation is replaced by 1.
    Returns ``(scaled (N, 2) array, ScalingParams)``.
    """
    lens, incs = _lens_incs(pieces)
    if len(lens) == 0:
        raise InvalidInput("no pieces to scale")
    params = ScalingParams(scl, _std(lens), _std(incs))
    return params.forward(lens, incs), params


def auto_alpha(n: int, N: int, tol: float, eta: float = 1.0) -> float:
    """Aggregation tolerance matched to the compression error budget.

    Equates the squared norm of the worst-case (eta standard deviations)
    digitization error realization with ``(n - N) * tol**2``.
    """
    if not (n > N >= 1):
        raise InvalidInput(f"auto alpha needs n > N >= 1, got n={n}, N={N}")
    if not (tol > 0 and eta > 0):
        raise InvalidInput("tol and eta must be positive")
    n = float(n)
    num = 60.0 * n * (n - N) * tol * tol
    den = N * eta * eta * (3.0 * n ** 4 + 2.0 - 5.0 * n ** 2)
    return (num / den) ** 0.25


def compression_rate(codebook_or_k, n: int) -> float:
    """``1 - |alphabet| / n``."""
    k = codebook_or_k.k if isinstance(codebook_or_k, Codebook) else int(codebook_or_k)
    if n <= 0:
        raise InvalidInput("n must be positive")
    if k < 0 or k >= n:
        raise InvalidInput(f"alphabet of {k} symbols leaves (0, 1] for n={n}")
    return 1.0 - k / n


def _relabel_by_size(labels: np.ndarray, k: int) -> np.ndarray:
    """Map cluster ids so that 0 is the largest cluster; ties by first occurrence."""
    counts = np.bincount(labels, minlength=k)
    first = np.full(k, len(labels), np.int64)
    np.minimum.at(first, labels, np.arange(len(labels)))
    order = np.lexsort((first, -counts))
    remap = np.empty(k, np.int64)
    remap[order] = np.arange(k)
    return remap


def _compact(labels: np.ndarray) -> np.ndarray:
    _, inv = np.unique(labels, return_inverse=True)
    return inv.astype(np.int64)


def _hierarchical(points, cfg: GAConfig):
    a_len = cfg.alpha_len if cfg.alpha_len is not None else cfg.alpha
    a_inc = cfg.alpha_inc if cfg.alpha_inc is not None else cfg.alpha
    len_groups, _, _ = greedy_aggregate(points[:, :1], GAConfig(a_len, cfg.sort_key))
    inc_groups, _, _ = greedy_aggregate(points[:, 1:], GAConfig(a_inc, cfg.sort_key))
    pairs = len_groups * (int(inc_groups.max()) + 1) + inc_groups
    # enumerate observed pairs in first-occurrence order
    _, first, inv = np.unique(pairs, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    return rank[inv].astype(np.int64)


def digitize(pieces, backend: str = "ga", scl: float = 1.0, *, k: int | None = None,
             alpha: float | None = None, r: float = 0.5, tol: float | None = None,
             eta: float = 1.0, sort_key: str = "pca", alpha_len: float | None = None,
             alpha_inc: float | None = None, seed: int | None = None, max_iters: int = 300,
             n_init: int = 1, refine: bool = True):
    """Cluster the pieces of one or many series into one shared codebook.

    ``pieces`` is a ``PartitionedPieces``, a list of ``PieceSequence`` or a
    single ``PieceSequence``; symbol strings are split back per unit.

    With ``refine`` (default) the back-end partition is polished by
    assign-to-nearest / recompute-mean sweeps until stable, so that every
    piece carries the symbol of its nearest center and every center is the
    mean of its pieces.

    Returns ``(Codebook, SymbolicResult)``.
    """
    backend = ALIASES.get(backend, backend)
    if backend not in BACKENDS:
        raise InvalidInput(f"unknown backend {backend!r}; choose from {BACKENDS}")
    if isinstance(pieces, PieceSequence):
        seqs = (pieces,)
    elif isinstance(pieces, PartitionedPieces):
        seqs = pieces.sequences
    else:
        seqs = tuple(pieces)
    if not seqs or sum(len(s) for s in seqs) == 0:
        raise InvalidInput("no pieces to digitize")

    lens = np.concatenate([s.lens for s in seqs])
    incs = np.concatenate([s.incs for s in seqs])
    points, scaling = scale_pieces(np.column_stack([lens, incs]), scl)
    n_pieces = len(points)

    if backend in ("vq", "sampling-vq"):
        if k is None:
            raise InvalidInput(f"backend {backend!r} needs k")
        cfg = VQConfig(int(k), r if backend == "sampling-vq" else 1.0, max_iters, n_init, seed)
        if backend == "vq":
            labels, _ = kmeans(points, cfg)
        else:
            labels, _ = sampling_kmeans(points, cfg)
    elif backend == "ga-hierarchical":
        if alpha is None and (alpha_len is None or alpha_inc is None):
            raise InvalidInput("ga-hierarchical needs alpha or both alpha_len and alpha_inc")
        base = alpha if alpha is not None else max(alpha_len, alpha_inc)
        labels = _hierarchical(points, GAConfig(base, sort_key, alpha_len, alpha_inc))
    else:
        if backend == "ga-auto":
            if tol is None:
                raise InvalidInput("ga-auto needs the compression tol")
            alpha = auto_alpha(int(lens.sum()), n_pieces, tol, AutoDigitizeConfig(eta).eta)
        elif alpha is None:
            raise InvalidInput("ga needs alpha")
        labels, _, _ = greedy_aggregate(points, GAConfig(alpha, sort_key))

    labels = _compact(labels)
    n_clusters = int(labels.max()) + 1
    centers, labels = cluster_means(points, labels, n_clusters)
    if refine:
        labels, centers, _ = lloyd(points, centers, max_iters)

    remap = _relabel_by_size(labels, n_clusters)
    labels = remap[labels]
    centers, labels = cluster_means(points, labels, n_clusters)
    if refine:
        # relabeling can flip exact ties between centers; settle them again
        labels, centers, _ = lloyd(points, centers, max_iters)
    mean_lens = np.bincount(labels, weights=lens.astype(np.float64), minlength=n_clusters)
    mean_lens /= np.bincount(labels, minlength=n_clusters)

    codebook = Codebook(centers, make_symbols(n_clusters), scaling, backend, mean_lens,
                        tol=tol, seed=seed)
    return codebook, _split(codebook, labels, seqs)


def _split(codebook: Codebook, labels: np.ndarray, seqs) -> SymbolicResult:
    bounds = np.concatenate([[0], np.cumsum([len(s) for s in seqs])])
    per = [labels[bounds[i]:bounds[i + 1]] for i in range(len(seqs))]
    return SymbolicResult(
        strings=tuple(tuple(codebook.encode(l)) for l in per),
        codebook=codebook,
        anchors=tuple(s.anchor for s in seqs),
        source_lengths=tuple(s.source_length for s in seqs),
        labels=tuple(per),
        ids=tuple(s.source_id for s in seqs),
        offsets=tuple(s.offset for s in seqs),
    )


def assign(codebook: Codebook, pieces) -> np.ndarray:
    """Nearest-center labels of ``pieces`` under a fitted codebook."""
    lens, incs = _lens_incs(pieces)
    points = codebook.scaling.forward(lens, incs)
    labels, _ = nearest_center(points, codebook.centers)
    return labels


def apply_codebook(codebook: Codebook, pieces) -> SymbolicResult:
    """Symbolize new pieces with an existing codebook (symbols stay consistent)."""
    if isinstance(pieces, PieceSequence):
        seqs = (pieces,)
    elif isinstance(pieces, PartitionedPieces):
        seqs = pieces.sequences
    else:
        seqs = tuple(pieces)
    return _split(codebook, assign(codebook, seqs), seqs)
