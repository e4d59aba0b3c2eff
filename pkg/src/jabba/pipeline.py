"""Joint symbolization end to end: partitional compression, one shared
digitization, split back per series."""

from __future__ import annotations

import numpy as np

from .compression import CompressionConfig, partitional_compress
from .core import Codebook, Dataset, SymbolicResult, TimeSeries
from .digitization import apply_codebook, digitize
from .errors import InvalidInput
from .inverse import inverse_symbolize


def as_dataset(data, partitions: int = 1) -> Dataset:
    """Coerce arrays, a TimeSeries or a list of series into a Dataset.

    A single series with ``partitions > 1`` becomes a univariate-partitioned
    dataset; a 2-D array is read as multivariate with one row per dimension.
    """
    if isinstance(data, Dataset):
        return data
    if isinstance(data, TimeSeries):
        return Dataset((data,), "univariate-partitioned", partitions)
    if isinstance(data, np.ndarray) and data.ndim == 2:
        return Dataset(tuple(TimeSeries(row, id=str(i)) for i, row in enumerate(data)),
                       "multivariate")
    if isinstance(data, (list, tuple)) and data and not np.isscalar(data[0]):
        return Dataset(tuple(s if isinstance(s, TimeSeries) else TimeSeries(s, id=str(i))
                             for i, s in enumerate(data)), "collection")
    return Dataset((TimeSeries(data),), "univariate-partitioned", partitions)


def symbolize(data, tol: float, backend: str = "ga", *, partitions: int = 1,
              threads: int | None = 1, **digitize_kw) -> SymbolicResult:
    """Compress every unit of ``data`` (in parallel) and digitize all pieces jointly.

    Extra keyword arguments go to :func:`jabba.digitization.digitize`.
    """
    dataset = as_dataset(data, partitions)
    if partitions != 1 and dataset.layout != "univariate-partitioned":
        raise InvalidInput("partitions only apply to a single univariate series")
    pieces = partitional_compress(dataset, CompressionConfig(tol), threads=threads)
    _, result = digitize(pieces, backend, tol=tol, **digitize_kw)
    return result


def symbolize_with(codebook: Codebook, data, *, partitions: int = 1,
                   threads: int | None = 1) -> SymbolicResult:
    """Symbolize new data with a fitted codebook, reusing its compression tol."""
    if codebook.tol is None:
        raise InvalidInput("codebook carries no compression tol")
    dataset = as_dataset(data, partitions)
    pieces = partitional_compress(dataset, CompressionConfig(codebook.tol), threads=threads)
    return apply_codebook(codebook, pieces)


def reconstruct(symbolic: SymbolicResult) -> list[TimeSeries]:
    return inverse_symbolize(symbolic)
