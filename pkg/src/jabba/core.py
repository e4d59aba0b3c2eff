"""Domain types shared across the package.

All containers are frozen dataclasses holding numpy arrays.  They are treated
as immutable after construction; arrays are marked read-only where we own them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput, InvalidPiece, LayoutError, UnknownSymbol

LAYOUTS = ("univariate-partitioned", "multivariate", "collection")

# '!'..'~' rotated so that the first token is 'A'
_PRINTABLE = "".join(chr(33 + (32 + i) % 94) for i in range(94))


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    id: str = "0"

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        if values.ndim != 1:
            raise InvalidInput(f"series {self.id!r}: expected a 1-D sequence, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidInput(f"series {self.id!r}: values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "id", str(self.id))

    def __len__(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class Dataset:
    """An ordered group of series plus how they relate.

    ``univariate-partitioned`` holds a single series that compression splits
    into ``m`` contiguous segments; ``multivariate`` holds ``m`` equal-length
    dimensions; ``collection`` holds ``m`` unrelated series.
    """

    series: tuple
    layout: str = "collection"
    m: int | None = None

    def __post_init__(self):
        series = tuple(s if isinstance(s, TimeSeries) else TimeSeries(s, id=str(i))
                       for i, s in enumerate(self.series))
        object.__setattr__(self, "series", series)
        if not series:
            raise InvalidInput("dataset is empty")
        if self.layout not in LAYOUTS:
            raise LayoutError(f"unknown layout {self.layout!r}")
        if self.layout == "univariate-partitioned":
            if len(series) != 1:
                raise LayoutError("univariate-partitioned layout holds exactly one series")
            m = 1 if self.m is None else int(self.m)
            if m < 1:
                raise LayoutError("m must be positive")
        else:
            m = len(series)
            if self.m is not None and int(self.m) != m:
                raise LayoutError(f"m={self.m} does not match {m} member series")
        if len({s.id for s in series}) != len(series):
            raise LayoutError("series ids must be unique")
        if self.layout == "multivariate" and len({len(s) for s in series}) != 1:
            raise LayoutError("multivariate dimensions must have equal length")
        object.__setattr__(self, "m", m)

    def __len__(self) -> int:
        return len(self.series)


class Piece(NamedTuple):
    len: int
    inc: float


@dataclass(frozen=True)
class PieceSequence:
    """Pieces of one (segment of a) series.

    ``offset`` is the index of the anchor sample in the parent series, which is
    nonzero only for later segments of a partitioned series.
    """

    lens: np.ndarray
    incs: np.ndarray
    anchor: float
    source_id: str = "0"
    source_length: int | None = None
    offset: int = 0

    def __post_init__(self):
        lens = _frozen(self.lens, np.int64)
        incs = _frozen(self.incs, np.float64)
        if lens.shape != incs.shape or lens.ndim != 1:
            raise InvalidPiece("lens and incs must be 1-D arrays of equal length")
        if len(lens) == 0:
            raise InvalidPiece("a piece sequence needs at least one piece")
        if np.any(lens < 1):
            raise InvalidPiece("piece lengths must be >= 1")
        total = int(lens.sum())
        n = total if self.source_length is None else int(self.source_length)
        if n != total:
            raise InvalidPiece(f"piece lengths sum to {total}, expected {n}")
        object.__setattr__(self, "lens", lens)
        object.__setattr__(self, "incs", incs)
        object.__setattr__(self, "anchor", float(self.anchor))
        object.__setattr__(self, "source_id", str(self.source_id))
        object.__setattr__(self, "source_length", n)
        object.__setattr__(self, "offset", int(self.offset))

    def __len__(self) -> int:
        return len(self.lens)

    def __iter__(self) -> Iterator[Piece]:
        for l, i in zip(self.lens.tolist(), self.incs.tolist()):
            yield Piece(l, i)

    @property
    def pieces(self) -> list[Piece]:
        return list(self)

    @property
    def end_value(self) -> float:
        return self.anchor + float(self.incs.sum())

    def as_array(self) -> np.ndarray:
        """(N, 2) float array of (len, inc) rows."""
        return np.column_stack([self.lens.astype(np.float64), self.incs])


@dataclass(frozen=True)
class ScalingParams:
    scl: float
    sigma_len: float
    sigma_inc: float

    def __post_init__(self):
        if not self.scl >= 0:
            raise InvalidInput("scl must be nonnegative")
        if not (self.sigma_len > 0 and self.sigma_inc > 0):
            raise InvalidInput("standard deviations must be positive")
        for name in ("scl", "sigma_len", "sigma_inc"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def forward(self, lens, incs) -> np.ndarray:
        lens = np.asarray(lens, dtype=np.float64)
        incs = np.asarray(incs, dtype=np.float64)
        return np.column_stack([self.scl * lens / self.sigma_len, incs / self.sigma_inc])


def make_symbols(k: int) -> tuple[str, ...]:
    """Alphabet for ``k`` clusters: single printable characters from 'A', or ``#<id>`` beyond 94."""
    if k <= len(_PRINTABLE):
        return tuple(_PRINTABLE[:k])
    return tuple(f"#{i}" for i in range(k))


@dataclass(frozen=True)
class Codebook:
    """Symbolic centers in scaled (len, inc) space and their alphabet.

    ``mean_lens`` keeps the per-cluster mean of the raw piece lengths, which is
    what inverse digitization uses when ``scl == 0`` makes the length axis
    non-invertible.
    """

    centers: np.ndarray
    symbols: tuple
    scaling: ScalingParams
    digitizer_tag: str
    mean_lens: np.ndarray
    tol: float | None = None
    seed: int | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        centers = _frozen(self.centers, np.float64).reshape(-1, 2)
        mean_lens = _frozen(self.mean_lens, np.float64)
        symbols = tuple(str(s) for s in self.symbols)
        if len(symbols) != len(centers) or len(mean_lens) != len(centers):
            raise InvalidInput("centers, symbols and mean_lens must have the same length")
        if len(set(symbols)) != len(symbols):
            raise InvalidInput("symbols must be pairwise distinct")
        if not np.all(np.isfinite(centers)) or not np.all(np.isfinite(mean_lens)):
            raise InvalidInput("codebook centers must be finite")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "mean_lens", mean_lens)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    @property
    def k(self) -> int:
        return len(self.symbols)

    def encode(self, labels: Sequence[int]) -> list[str]:
        return [self.symbols[i] for i in labels]

    def decode(self, tokens: Sequence[str]) -> np.ndarray:
        try:
            return np.array([self._index[t] for t in tokens], dtype=np.int64)
        except KeyError as exc:
            raise UnknownSymbol(f"symbol {exc.args[0]!r} is not in the codebook") from None

    def __eq__(self, other):
        if not isinstance(other, Codebook):
            return NotImplemented
        return (self.symbols == other.symbols
                and self.scaling == other.scaling
                and self.digitizer_tag == other.digitizer_tag
                and self.tol == other.tol
                and self.seed == other.seed
                and np.array_equal(self.centers, other.centers)
                and np.array_equal(self.mean_lens, other.mean_lens))

    __hash__ = None


@dataclass(frozen=True)
class SymbolicResult:
    """Per-series symbol strings plus what inverse symbolization needs.

    Entries are per compressed unit: a whole series, a dimension, or one
    segment of a partitioned series (``offsets`` then locates it).
    """

    strings: tuple
    codebook: Codebook
    anchors: tuple
    source_lengths: tuple
    labels: tuple
    ids: tuple
    offsets: tuple = ()

    def __post_init__(self):
        strings = tuple(tuple(s) for s in self.strings)
        labels = tuple(_frozen(l, np.int64) for l in self.labels)
        n = len(strings)
        offsets = tuple(int(o) for o in self.offsets) if self.offsets else (0,) * n
        if not (len(self.anchors) == len(self.source_lengths) == len(labels) == len(self.ids)
                == len(offsets) == n):
            raise InvalidInput("per-series fields must all have the same length")
        alphabet = set(self.codebook.symbols)
        for s, l in zip(strings, labels):
            if len(s) != len(l):
                raise InvalidInput("token count must equal piece count")
            if not alphabet.issuperset(s):
                raise InvalidInput("token outside the codebook alphabet")
        object.__setattr__(self, "strings", strings)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "anchors", tuple(float(a) for a in self.anchors))
        object.__setattr__(self, "source_lengths", tuple(int(x) for x in self.source_lengths))
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "offsets", offsets)

    def __len__(self) -> int:
        return len(self.strings)

    @property
    def n_symbols(self) -> int:
        return self.codebook.k

    def __eq__(self, other):
        if not isinstance(other, SymbolicResult):
            return NotImplemented
        return (self.strings == other.strings and self.codebook == other.codebook
                and self.anchors == other.anchors and self.source_lengths == other.source_lengths
                and self.ids == other.ids and self.offsets == other.offsets
                and all(np.array_equal(a, b) for a, b in zip(self.labels, other.labels)))

    __hash__ = None


@dataclass
class BenchReport:
    """One row of a benchmark table."""

    method: str
    mse: float = float("nan")
    dtw: float = float("nan")
    sse: float = float("nan")
    tau_c: float = float("nan")
    n_symbols: int = 0
    threads: int = 1
    partitions: int = 1
    runtime_seconds: dict = field(default_factory=dict)
    speedup: float = float("nan")
    n_codebooks: int = 1

    def __post_init__(self):
        for name in ("mse", "dtw", "sse"):
            v = getattr(self, name)
            if v < 0:
                raise InvalidInput(f"{name} must be nonnegative")
        if self.tau_c > 1:
            raise InvalidInput("tau_c must not exceed 1")

    def as_dict(self) -> dict:
        row = {k: getattr(self, k) for k in
               ("method", "mse", "dtw", "sse", "tau_c", "n_symbols", "threads",
                "partitions", "speedup", "n_codebooks")}
        for phase, secs in self.runtime_seconds.items():
            row[f"time_{phase}"] = secs
        return row
