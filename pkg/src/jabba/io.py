"""File formats: datasets, fitted models and symbol files."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import Codebook, Dataset, ScalingParams, SymbolicResult, TimeSeries
from .errors import InvalidInput, LayoutError, ModelVersionError, ParseError

MODEL_VERSION = 1
SYMBOLS_VERSION = 1
FORMATS = ("csv-rows", "csv-cols", "ts-lite")


def _number(cell: str, line: int, column: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell.strip()!r}", line, column) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite value {cell.strip()!r}", line, column)
    return v


def _data_lines(path):
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip() and not line.lstrip().startswith("#"):
                yield lineno, line.rstrip("\r\n")


def _load_csv_rows(path, partitions):
    series = []
    for lineno, line in _data_lines(path):
        cells = next(csv.reader([line]))
        values = [_number(c, lineno, col) for col, c in enumerate(cells, start=1) if c.strip()]
        series.append(TimeSeries(values, id=str(len(series))))
    if not series:
        raise InvalidInput(f"{path}: no data")
    if len(series) == 1:
        return Dataset(tuple(series), "univariate-partitioned", partitions)
    return Dataset(tuple(series), "collection")


def _load_csv_cols(path, partitions):
    rows = list(_data_lines(path))
    if len(rows) < 2:
        raise InvalidInput(f"{path}: need a header and at least one data row")
    header = [h.strip() for h in next(csv.reader([rows[0][1]]))]
    columns = [[] for _ in header]
    ended = [False] * len(header)
    for lineno, line in rows[1:]:
        cells = next(csv.reader([line]))
        if len(cells) > len(header):
            raise ParseError(f"{len(cells)} cells but {len(header)} header columns", lineno)
        cells += [""] * (len(header) - len(cells))
        for col, cell in enumerate(cells):
            if not cell.strip():
                ended[col] = True
            elif ended[col]:
                raise LayoutError(f"line {lineno}: column {header[col]!r} resumes after a gap")
            else:
                columns[col].append(_number(cell, lineno, col + 1))
    series = tuple(TimeSeries(c, id=h) for h, c in zip(header, columns))
    if len(series) == 1:
        return Dataset(series, "univariate-partitioned", partitions)
    if len({len(s) for s in series}) != 1:
        raise LayoutError(f"{path}: columns have different lengths")
    return Dataset(series, "multivariate")


def _load_ts_lite(path):
    dims = []
    for lineno, line in _data_lines(path):
        parts = line.split(":", 2)
        if len(parts) != 3:
            raise ParseError("expected '<series id>:<dimension id>:<v1>,<v2>,...'", lineno)
        sid, dim, body = (p.strip() for p in parts)
        values = [_number(c, lineno, col) for col, c in enumerate(body.split(","), start=3)]
        dims.append(TimeSeries(values, id=f"{sid}:{dim}"))
    if not dims:
        raise InvalidInput(f"{path}: no data")
    if len({len(d) for d in dims}) != 1:
        raise LayoutError(f"{path}: ragged dimensions "
                          f"({sorted({len(d) for d in dims})} values per line)")
    return Dataset(tuple(dims), "multivariate")


def load_dataset(path, format: str = "csv-rows", partitions: int = 1) -> Dataset:
    """Read a dataset.

    ``csv-rows``: one series per line.  ``csv-cols``: one series per column
    under a header row.  ``ts-lite``: one dimension per line written as
    ``<series id>:<dimension id>:<v1>,<v2>,...``.
    """
    if format not in FORMATS:
        raise InvalidInput(f"unknown format {format!r}; choose from {FORMATS}")
    if format == "csv-rows":
        return _load_csv_rows(path, partitions)
    if format == "csv-cols":
        return _load_csv_cols(path, partitions)
    return _load_ts_lite(path)


def write_series(path, series, ids: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        for s in series:
            cells = [repr(float(v)) for v in s.values]
            fh.write(",".join(([s.id] if ids else []) + cells) + "\n")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def model_to_dict(codebook: Codebook) -> dict:
    return {
        "version": MODEL_VERSION,
        "digitizer_tag": codebook.digitizer_tag,
        "scaling": {"scl": codebook.scaling.scl, "sigma_len": codebook.scaling.sigma_len,
                    "sigma_inc": codebook.scaling.sigma_inc},
        "centers": [[float(a), float(b)] for a, b in codebook.centers],
        "symbols": list(codebook.symbols),
        "mean_lens": [float(x) for x in codebook.mean_lens],
        "seed": codebook.seed,
        "tol": codebook.tol,
    }


def model_from_dict(d: dict) -> Codebook:
    if d.get("version") != MODEL_VERSION:
        raise ModelVersionError(f"model version {d.get('version')!r} is not supported "
                                f"(expected {MODEL_VERSION})")
    try:
        sc = d["scaling"]
        return Codebook(
            centers=np.array(d["centers"], dtype=np.float64).reshape(-1, 2),
            symbols=tuple(d["symbols"]),
            scaling=ScalingParams(sc["scl"], sc["sigma_len"], sc["sigma_inc"]),
            digitizer_tag=d["digitizer_tag"],
            mean_lens=np.array(d["mean_lens"], dtype=np.float64),
            tol=d.get("tol"),
            seed=d.get("seed"),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed model: {exc}") from None


def save_model(codebook: Codebook, path) -> None:
    Path(path).write_text(_dumps(model_to_dict(codebook)))


def load_model(path) -> Codebook:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return model_from_dict(d)


def symbols_to_dict(result: SymbolicResult) -> dict:
    return {
        "version": SYMBOLS_VERSION,
        "units": [
            {"id": i, "tokens": list(s), "anchor": a, "offset": o, "length": n}
            for i, s, a, o, n in zip(result.ids, result.strings, result.anchors,
                                     result.offsets, result.source_lengths)
        ],
    }


def write_symbols(result: SymbolicResult, path, as_json: bool = False) -> None:
    """One line per unit: ``<id>\\t<token token ...>\\t<anchor>\\t<offset>\\t<length>``.

    The trailing columns are what reconstruction needs besides the model.
    """
    if as_json:
        Path(path).write_text(_dumps(symbols_to_dict(result)))
        return
    with open(path, "w") as fh:
        for i, s, a, o, n in zip(result.ids, result.strings, result.anchors,
                                 result.offsets, result.source_lengths):
            fh.write(f"{i}\t{' '.join(s)}\t{a!r}\t{o}\t{n}\n")


def read_symbols(path, codebook: Codebook) -> SymbolicResult:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        if d.get("version") != SYMBOLS_VERSION:
            raise ModelVersionError(f"symbols version {d.get('version')!r} is not supported")
        try:
            units = [(u["id"], u["tokens"], u["anchor"], u["offset"], u["length"])
                     for u in d["units"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed symbols file: {exc}") from None
    else:
        units = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise ParseError("expected 5 tab-separated columns", lineno)
            units.append((cols[0], cols[1].split(), _number(cols[2], lineno, 3),
                          int(_number(cols[3], lineno, 4)), int(_number(cols[4], lineno, 5))))
    labels = [codebook.decode(tokens) for _, tokens, _, _, _ in units]
    return SymbolicResult(
        strings=tuple(tuple(t) for _, t, _, _, _ in units),
        codebook=codebook,
        anchors=tuple(u[2] for u in units),
        source_lengths=tuple(u[4] for u in units),
        labels=tuple(labels),
        ids=tuple(u[0] for u in units),
        offsets=tuple(u[3] for u in units),
    )
