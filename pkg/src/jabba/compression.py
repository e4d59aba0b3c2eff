"""Adaptive polygonal-chain compression of time series into (len, inc) pieces."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Dataset, PieceSequence, TimeSeries
from .errors import InvalidInput, InvalidPartition, InvalidPiece


@dataclass(frozen=True)
class CompressionConfig:
    tol: float
    max_piece_len: int | None = None

    def __post_init__(self):
        if not (np.isfinite(self.tol) and self.tol > 0):
            raise InvalidInput(f"tol must be a positive finite number, got {self.tol}")
        if self.max_piece_len is not None and self.max_piece_len < 1:
            raise InvalidInput("max_piece_len must be a positive integer")


@njit(nogil=True, cache=True)
def _direct_error(ts, start, length):
    t0 = ts[start]
    slope = (ts[start + length] - t0) / length
    err = 0.0
    for x in range(length + 1):
        d = t0 + slope * x - ts[start + x]
        err += d * d
    return err


@njit(nogil=True, cache=True)
def _compress_kernel(ts, tol2, max_len):
    n = ts.shape[0] - 1
    lens = np.empty(n, np.int64)
    incs = np.empty(n, np.float64)
    count = 0
    start = 0
    while start < n:
        t0 = ts[start]
        # running sums over x = 1..L of u_x = t[start+x] - t0
        u = ts[start + 1] - t0
        su2 = u * u
        sxu = u
        best = 1
        limit = min(n - start, max_len)
        for length in range(2, limit + 1):
            u = ts[start + length] - t0
            su2 += u * u
            sxu += length * u
            sx2 = length * (length + 1.0) * (2.0 * length + 1.0) / 6.0
            s = u / length
            head = s * s * sx2 + su2
            err = head - 2.0 * s * sxu
            bound = (length - 1) * tol2
            if abs(err - bound) <= 1e-10 * head:
                err = _direct_error(ts, start, length)
            if err <= bound:
                best = length
            else:
                break
        lens[count] = best
        incs[count] = ts[start + best] - t0
        count += 1
        start += best
    return lens[:count], incs[:count]


def _values(series) -> tuple[np.ndarray, str]:
    if isinstance(series, TimeSeries):
        return series.values, series.id
    return TimeSeries(series).values, "0"


def compress(series, cfg: CompressionConfig | float) -> PieceSequence:
    """Greedy left-to-right polygonal approximation within ``tol``.

    From each breakpoint the piece is extended one sample at a time for as long
    as the squared deviation of the covered samples from the chord between the
    endpoints stays within ``(len - 1) * tol**2``.
    """
    if not isinstance(cfg, CompressionConfig):
        cfg = CompressionConfig(float(cfg))
    values, sid = _values(series)
    if len(values) < 2:
        raise InvalidInput(f"series {sid!r} needs at least 2 values to compress, got {len(values)}")
    max_len = cfg.max_piece_len if cfg.max_piece_len is not None else len(values)
    lens, incs = _compress_kernel(np.ascontiguousarray(values), cfg.tol * cfg.tol, max_len)
    return PieceSequence(lens, incs, anchor=values[0], source_id=sid,
                         source_length=len(values) - 1)


def inverse_compress(pieces: PieceSequence, lens=None) -> np.ndarray:
    """Polygonal chain through the piece endpoints, sampled on the integer grid.

    ``lens`` overrides the stored integer lengths (used after quantization).
    """
    lens = np.asarray(pieces.lens if lens is None else lens)
    if len(lens) == 0:
        raise InvalidPiece("no pieces to invert")
    if np.any(lens < 1) or np.any(lens != np.round(lens)):
        raise InvalidPiece("piece lengths must be integers >= 1")
    knots_x = np.concatenate([[0], np.cumsum(lens.astype(np.int64))])
    knots_y = pieces.anchor + np.concatenate([[0.0], np.cumsum(pieces.incs)])
    grid = np.arange(knots_x[-1] + 1)
    out = np.interp(grid, knots_x, knots_y)
    # np.interp evaluates right endpoints from the left neighbour; pin knots exactly
    out[knots_x] = knots_y
    return out


def segment_bounds(length: int, m: int) -> list[tuple[int, int]]:
    """Half-open index ranges of ``m`` near-equal contiguous segments.

    The first ``length % m`` segments get one extra sample.
    """
    if m < 1 or m > length - 1:
        raise InvalidPartition(f"cannot split {length} samples into {m} segments")
    base, extra = divmod(length, m)
    bounds, lo = [], 0
    for i in range(m):
        hi = lo + base + (1 if i < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


@dataclass(frozen=True)
class PartitionedPieces:
    """Concatenated pieces of a dataset plus where each unit starts and ends."""

    sequences: tuple
    layout: str

    @property
    def boundaries(self) -> np.ndarray:
        """Cumulative piece counts; unit ``i`` owns pieces ``[b[i], b[i+1])``."""
        return np.concatenate([[0], np.cumsum([len(s) for s in self.sequences])]).astype(np.int64)

    @property
    def lens(self) -> np.ndarray:
        return np.concatenate([s.lens for s in self.sequences])

    @property
    def incs(self) -> np.ndarray:
        return np.concatenate([s.incs for s in self.sequences])

    @property
    def n_pieces(self) -> int:
        return sum(len(s) for s in self.sequences)

    @property
    def total_length(self) -> int:
        return sum(s.source_length for s in self.sequences)

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)


def units(dataset: Dataset) -> list[tuple[np.ndarray, str, int]]:
    """``(values, id, offset)`` of every independently compressed unit."""
    if dataset.layout == "univariate-partitioned":
        ts = dataset.series[0]
        bounds = segment_bounds(len(ts), dataset.m)
        jobs = []
        for i, (lo, hi) in enumerate(bounds):
            # later segments start at the previous segment's last sample
            start = lo if i == 0 else lo - 1
            jobs.append((ts.values[start:hi], ts.id, start))
        return jobs
    for s in dataset.series:
        if len(s) < 2:
            raise InvalidPartition(f"series {s.id!r} is too short to compress")
    return [(s.values, s.id, 0) for s in dataset.series]


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        return 1
    if threads == 0:
        return os.cpu_count() or 1
    if threads < 0:
        raise InvalidInput("threads must be >= 0")
    return threads


def partitional_compress(dataset: Dataset, cfg: CompressionConfig | float,
                         threads: int | None = 1) -> PartitionedPieces:
    """Compress every unit of ``dataset`` independently (fork) and concatenate
    the results in input order (join).

    The output does not depend on ``threads``; ``0`` means one worker per CPU.
    """
    if not isinstance(cfg, CompressionConfig):
        cfg = CompressionConfig(float(cfg))
    jobs = units(dataset)

    def work(job):
        values, sid, offset = job
        seq = compress(TimeSeries(values, id=sid), cfg)
        return PieceSequence(seq.lens, seq.incs, seq.anchor, sid, seq.source_length, offset)

    workers = min(resolve_threads(threads), len(jobs))
    if workers <= 1:
        seqs = [work(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            seqs = list(pool.map(work, jobs))
    return PartitionedPieces(tuple(seqs), dataset.layout)


def stitch(recons, ids, offsets) -> list[tuple[str, np.ndarray]]:
    """Reassemble per-unit reconstructions into whole series.

    Units sharing an id are segments of one series; a later segment overwrites
    the shared boundary sample with its own (exact) anchor.
    """
    groups: dict[str, list] = {}
    order = []
    for rec, sid, off in zip(recons, ids, offsets):
        if sid not in groups:
            groups[sid] = []
            order.append(sid)
        groups[sid].append((off, rec))
    out = []
    for sid in order:
        parts = groups[sid]
        if len(parts) == 1 and parts[0][0] == 0:
            out.append((sid, parts[0][1]))
            continue
        n = max(off + len(rec) for off, rec in parts)
        full = np.empty(n)
        for off, rec in sorted(parts, key=lambda p: p[0]):
            full[off:off + len(rec)] = rec
        out.append((sid, full))
    return out
