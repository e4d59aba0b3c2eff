"""Desk-scale benchmark protocols and synthetic data generators."""

from __future__ import annotations

import csv
import json
import time
from math import fsum
from statistics import median

import numpy as np

from .compression import (CompressionConfig, PartitionedPieces, compress, inverse_compress,
                          partitional_compress, units)
from .core import BenchReport, Dataset, TimeSeries
from .digitization import (compression_rate, digitize, kmeans, sampling_kmeans,
                           scale_pieces, VQConfig, auto_alpha)
from .errors import InvalidInput, InvariantViolation, LayoutError
from .inverse import inverse_symbolize, reconstructed_inc_total
from .metrics import ami, dtw, mse, speedup

DEFAULT_SEED = 2024


# -- synthetic data ---------------------------------------------------------

def gaussian_noise(n: int = 100_000, seed: int = DEFAULT_SEED) -> TimeSeries:
    return TimeSeries(np.random.default_rng(seed).standard_normal(n), id="noise")


def random_walk(n: int = 2_000, seed: int = DEFAULT_SEED) -> TimeSeries:
    steps = np.random.default_rng(seed).standard_normal(n - 1)
    return TimeSeries(np.concatenate([[0.0], np.cumsum(steps)]), id=f"walk-{seed}")


def blobs(n: int, centers: int = 10, seed: int = DEFAULT_SEED, spread: float = 10.0,
          std: float = 1.0, dim: int = 2):
    """Isotropic Gaussian blobs; returns ``(points, true_labels)``."""
    rng = np.random.default_rng(seed)
    means = rng.uniform(-spread, spread, size=(centers, dim))
    labels = np.arange(n) % centers
    rng.shuffle(labels)
    return means[labels] + std * rng.standard_normal((n, dim)), labels


def sinusoid_bundle(d: int = 3, n: int = 500, seed: int = DEFAULT_SEED,
                    noise: float = 0.002) -> Dataset:
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 8 * np.pi, n)
    dims = []
    for i in range(d):
        phase = rng.uniform(0, 2 * np.pi)
        freq = 1.0 + 0.5 * i
        values = np.sin(freq * t + phase) + noise * rng.standard_normal(n)
        dims.append(TimeSeries(values, id=f"dim{i}"))
    return Dataset(tuple(dims), "multivariate")


# -- helpers ----------------------------------------------------------------

def _timed(fn, repeats: int):
    times, out = [], None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, median(times)


def _warmup():
    compress(np.array([0.0, 1.0, 0.5, 2.0]), 0.1)


def fit_sse(pieces, symbolic) -> float:
    """Clustering SSE of a fit, in the scaled space the clustering ran in."""
    points, _ = scale_pieces(pieces, symbolic.codebook.scaling.scl)
    labels = np.concatenate(symbolic.labels)
    return float(((points - symbolic.codebook.centers[labels]) ** 2).sum())


def validate_run(dataset: Dataset, pieces, symbolic, tol: float, alpha: float | None = None,
                 rtol: float = 1e-9) -> float:
    """Re-check the guarantees of one run; raise InvariantViolation on failure.

    Checks the compression error budget per unit, the aggregation SSE bound
    (when ``alpha`` is given) and that the reconstructed increments sum to the
    original ones over the whole fit.  Returns the clustering SSE.
    """
    for (values, sid, _), seq in zip(units(dataset), pieces.sequences):
        err = float(((inverse_compress(seq) - values) ** 2).sum())
        budget = (seq.source_length - len(seq)) * tol * tol
        if err > budget * (1 + rtol) + 1e-300:
            raise InvariantViolation(f"{sid}: compression error {err} exceeds {budget}")
    sse = fit_sse(pieces, symbolic)
    if alpha is not None:
        bound = alpha * alpha * (pieces.n_pieces - symbolic.codebook.k)
        if sse > bound * (1 + rtol):
            raise InvariantViolation(f"aggregation SSE {sse} exceeds {bound}")
    if not increments_preserved(pieces, symbolic, rtol):
        raise InvariantViolation("reconstructed increments do not sum to the original ones")
    return sse


def increments_preserved(pieces, symbolic, rtol: float = 1e-9) -> bool:
    """Whether the reconstructed increments sum to the original ones.

    Relative to the larger of the total and the mean absolute increment, so a
    total that happens to be near zero is not judged on round-off alone.
    """
    incs = pieces.incs
    total = fsum(incs)
    recon = reconstructed_inc_total(symbolic)
    scale = max(abs(total), float(np.abs(incs).mean()))
    return abs(recon - total) <= rtol * scale


def _recon_scores(dataset: Dataset, symbolic, with_dtw: bool):
    originals = {s.id: s.values for s in dataset.series}
    recon = inverse_symbolize(symbolic)
    mses = [mse(originals[r.id], r.values) for r in recon]
    dtws = [dtw(originals[r.id], r.values) for r in recon] if with_dtw else [float("nan")]
    return float(np.mean(mses)), float(np.mean(dtws))


def _split_budget(k_total: int, caps) -> list[int]:
    """Split ``k_total`` as evenly as the per-part caps allow; surplus goes to
    parts with spare capacity so the parts still sum to ``k_total``."""
    caps = [int(c) for c in caps]
    if k_total > sum(caps):
        raise InvalidInput(f"cannot place {k_total} symbols into parts of sizes {caps}")
    ks = [1] * len(caps)
    left = k_total - len(caps)
    while left > 0:
        open_parts = [i for i, c in enumerate(caps) if ks[i] < c]
        share, extra = divmod(left, len(open_parts))
        for rank, i in enumerate(open_parts):
            add = min(caps[i] - ks[i], share + (1 if rank < extra else 0))
            ks[i] += add
            left -= add
    return ks


# -- protocols --------------------------------------------------------------

def run_multivariate_protocol(dataset: Dataset, tol: float = 0.01, *, r: float = 0.5,
                              eta: float = 1.0, scl: float = 1.0, seed: int = DEFAULT_SEED,
                              threads: int | None = 1, repeats: int = 3,
                              with_dtw: bool = True) -> list[BenchReport]:
    """Compare joint and per-dimension digitization under one symbol budget.

    Joint aggregation with the automatic alpha fixes alpha and the symbol
    count ``k_m``; joint sampling k-means reuses ``k_m`` (raising ``r`` when the
    sample would hold fewer than ``k_m`` pieces); per-dimension aggregation
    reuses alpha; per-dimension k-means splits ``k_m`` evenly across the ``d``
    dimensions.  All methods share one partitional
    compression.
    """
    if dataset.layout != "multivariate":
        raise LayoutError("the multivariate protocol needs a multivariate dataset")
    _warmup()
    pieces = partitional_compress(dataset, CompressionConfig(tol), threads=threads)
    n_total = sum(len(s) for s in dataset.series)
    d = dataset.m
    alpha = auto_alpha(pieces.total_length, pieces.n_pieces, tol, eta)
    rows = []

    def joint(method, backend, **kw):
        (_, res), secs = _timed(lambda: digitize(pieces, backend, scl, seed=seed, **kw), repeats)
        sse = validate_run(dataset, pieces, res, tol, alpha if backend.startswith("ga") else None)
        m, w = _recon_scores(dataset, res, with_dtw)
        rows.append(BenchReport(method, mse=m, dtw=w, sse=sse,
                                tau_c=compression_rate(res.n_symbols, n_total),
                                n_symbols=res.n_symbols, runtime_seconds={"digitize": secs}))
        return res

    ga = joint("joint-ga", "ga-auto", tol=tol, eta=eta)
    k_m = ga.n_symbols
    # the sample must hold at least k_m points
    r_vq = min(1.0, max(r, (k_m + 0.5) / pieces.n_pieces))
    joint("joint-vq", "sampling-vq", k=k_m, r=r_vq)

    def per_dim(method, backend, budget):
        def run():
            out = []
            for seq, kw in zip(pieces.sequences, budget):
                out.append(digitize([seq], backend, scl, seed=seed, **kw))
            return out
        fits, secs = _timed(run, repeats)
        mses, dtws, k, sse = [], [], 0, 0.0
        for seq, (cb, res) in zip(pieces.sequences, fits):
            sub = Dataset((next(s for s in dataset.series if s.id == seq.source_id),), "collection")
            sse += validate_run(sub, PartitionedPieces((seq,), "collection"), res, tol,
                                alpha if backend == "ga" else None)
            m, w = _recon_scores(sub, res, with_dtw)
            mses.append(m)
            dtws.append(w)
            k += cb.k
        rows.append(BenchReport(method, mse=float(np.mean(mses)), dtw=float(np.mean(dtws)),
                                sse=sse, tau_c=compression_rate(k, n_total), n_symbols=k,
                                runtime_seconds={"digitize": secs}, n_codebooks=len(fits)))

    per_dim("per-dim-ga", "ga", [{"alpha": alpha}] * d)
    ks = _split_budget(k_m, [len(s) for s in pieces.sequences])
    per_dim("per-dim-vq", "vq", [{"k": k} for k in ks])
    return rows


def run_partition_sweep(series, tol: float = 0.01, *, backend: str = "ga",
                        alpha: float | None = 0.05, k: int | None = None,
                        partitions=(1, 2, 4, 8, 16, 32), threads=None, scl: float = 1.0,
                        r: float = 0.5, seed: int = DEFAULT_SEED, repeats: int = 3,
                        validate: bool = True) -> list[BenchReport]:
    """Joint symbolization of one long series split into ``m`` partitions.

    Each ``m`` runs with ``m`` workers unless ``threads`` is given.  The
    compression phase is also timed at ``m = 1`` so every row carries the
    compression speedup.
    """
    ts = series if isinstance(series, TimeSeries) else TimeSeries(series)
    _warmup()
    kw = {"alpha": alpha} if backend.startswith("ga") else {"k": k, "r": r}
    compress_times = {}
    rows = []
    for m in sorted(set(partitions) | {1}):
        dataset = Dataset((ts,), "univariate-partitioned", m)
        workers = m if threads is None else threads
        pieces, t_comp = _timed(
            lambda: partitional_compress(dataset, CompressionConfig(tol), threads=workers), repeats)
        compress_times[m] = t_comp
        if m not in partitions:
            continue
        (_, res), t_dig = _timed(lambda: digitize(pieces, backend, scl, seed=seed, tol=tol, **kw),
                                 repeats)
        if validate:
            sse = validate_run(dataset, pieces, res, tol, alpha if backend == "ga" else None)
        else:
            sse = fit_sse(pieces, res)
        recon = inverse_symbolize(res)[0]
        rows.append(BenchReport(
            f"joint-{backend}", mse=mse(ts.values, recon.values), sse=sse,
            tau_c=compression_rate(res.n_symbols, len(ts)), n_symbols=res.n_symbols,
            threads=workers, partitions=m,
            runtime_seconds={"compress": t_comp, "digitize": t_dig, "total": t_comp + t_dig}))
    phi = speedup(compress_times)
    for row in rows:
        row.speedup = phi[row.partitions]
    return rows


def run_kmeans_comparison(sizes=(1_000, 10_000, 100_000), r: float = 0.1, k: int = 10,
                          seeds=range(5), repeats: int = 1, n_init: int = 10) -> list[dict]:
    """Full k-means++ against sampling k-means on Gaussian blobs: AMI and runtime.

    Both methods get the same number of restarts ``n_init``.
    """
    out = []
    for n in sizes:
        for s in seeds:
            pts, truth = blobs(n, k, seed=s)
            (lab_full, _), t_full = _timed(lambda: kmeans(pts, VQConfig(k, n_init=n_init, seed=s)), repeats)
            (lab_samp, _), t_samp = _timed(
                lambda: sampling_kmeans(pts, VQConfig(k, r=r, n_init=n_init, seed=s)), repeats)
            out.append({"n": n, "seed": s, "ami_full": ami(truth, lab_full),
                        "ami_sampling": ami(truth, lab_samp), "time_full": t_full,
                        "time_sampling": t_samp})
    return out


def alpha_curve(n: int, N: int, tols, eta: float = 1.0) -> list[dict]:
    return [{"tol": float(t), "alpha": auto_alpha(n, N, float(t), eta)} for t in tols]


# -- output -----------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def format_table(rows) -> str:
    """Aligned plain-text table of BenchReports or dicts."""
    dicts = [r.as_dict() if isinstance(r, BenchReport) else dict(r) for r in rows]
    if not dicts:
        return ""
    cols = list(dict.fromkeys(k for d in dicts for k in d))
    body = [[_cell(d.get(c, "")) for c in cols] for d in dicts]
    widths = [max(len(c), *(len(r[i]) for r in body)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in body]
    return "\n".join(lines)


def write_csv(rows, path) -> None:
    dicts = [r.as_dict() if isinstance(r, BenchReport) else dict(r) for r in rows]
    cols = list(dict.fromkeys(k for d in dicts for k in d))
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        writer.writerows(dicts)


def dump_json(rows, path) -> None:
    dicts = [r.as_dict() if isinstance(r, BenchReport) else dict(r) for r in rows]
    with open(path, "w") as fh:
        json.dump(dicts, fh, indent=2, sort_keys=True)
        fh.write("\n")
