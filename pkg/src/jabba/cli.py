"""Command-line interface.

Exit codes: 0 success, 1 data or validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import bench
from .compression import CompressionConfig, partitional_compress
from .core import Dataset
from .digitization import digitize
from .digitization.digitize import ALIASES, BACKENDS
from .errors import JabbaError
from .inverse import inverse_symbolize
from .io import FORMATS, load_dataset, load_model, read_symbols, save_model, write_series, write_symbols
from .metrics import mse


def _positive_int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("partition counts must be positive")
    return vals


def _backend(text: str) -> str:
    name = ALIASES.get(text, text)
    if name not in BACKENDS:
        raise argparse.ArgumentTypeError(
            f"unknown backend {text!r}; choose from vq, svq, ga, ga-auto, ga-hier")
    return name


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jabba", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symbolize", help="compress and digitize a dataset")
    p.add_argument("input")
    p.add_argument("--format", choices=FORMATS, default="csv-rows")
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--backend", type=_backend, default="ga")
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--scl", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--partitions", type=int, default=1)
    p.add_argument("--threads", type=int, default=1, help="0 = one per CPU")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out")
    p.add_argument("--out", required=True, help="symbols file")
    p.add_argument("--json", action="store_true", help="write symbols as JSON")

    p = sub.add_parser("reconstruct", help="rebuild series from symbols and a model")
    p.add_argument("--model", required=True)
    p.add_argument("--symbols", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--input", help="original data; report the reconstruction MSE")
    p.add_argument("--format", choices=FORMATS, default="csv-rows")

    p = sub.add_parser("inspect", help="summarize a saved model")
    p.add_argument("model")

    p = sub.add_parser("bench", help="benchmark protocols")
    bsub = p.add_subparsers(dest="protocol", required=True)
    b = bsub.add_parser("partition-sweep")
    b.add_argument("--n", type=int, default=100_000)
    b.add_argument("--input", help="csv-rows file with one series (default: Gaussian noise)")
    b.add_argument("--tol", type=float, default=0.01)
    b.add_argument("--backend", type=_backend, default="ga")
    b.add_argument("--alpha", type=float, default=0.05)
    b.add_argument("--k", type=int)
    b.add_argument("--r", type=float, default=0.5)
    b.add_argument("--partitions", type=_positive_int_list, default=[1, 2, 4, 8, 16, 32])
    b.add_argument("--threads", type=int, help="fixed worker count (default: one per partition)")
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=bench.DEFAULT_SEED)
    b.add_argument("--csv")
    b.add_argument("--json-out")
    b = bsub.add_parser("multivariate")
    b.add_argument("--input", help="ts-lite file (default: synthetic sinusoid bundle)")
    b.add_argument("--dims", type=int, default=3)
    b.add_argument("--length", type=int, default=500)
    b.add_argument("--tol", type=float, default=0.01)
    b.add_argument("--r", type=float, default=0.5)
    b.add_argument("--eta", type=float, default=1.0)
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=bench.DEFAULT_SEED)
    b.add_argument("--csv")
    b.add_argument("--json-out")
    return parser


def _symbolize(args) -> int:
    dataset = load_dataset(args.input, args.format, partitions=args.partitions)
    if args.partitions != 1 and dataset.layout != "univariate-partitioned":
        raise JabbaError("--partitions applies only to a single univariate series")
    pieces = partitional_compress(dataset, CompressionConfig(args.tol), threads=args.threads)
    codebook, result = digitize(pieces, args.backend, args.scl, k=args.k, alpha=args.alpha,
                                r=args.r, tol=args.tol, eta=args.eta, seed=args.seed)
    write_symbols(result, args.out, as_json=args.json)
    if args.model_out:
        save_model(codebook, args.model_out)
    print(f"{len(result)} unit(s), {pieces.n_pieces} pieces, {codebook.k} symbols")
    return 0


def _reconstruct(args) -> int:
    codebook = load_model(args.model)
    result = read_symbols(args.symbols, codebook)
    series = inverse_symbolize(result)
    write_series(args.out, series)
    if args.input:
        original = load_dataset(args.input, args.format)
        by_id = {s.id: s for s in original.series}
        if len(by_id) == len(series) and all(s.id in by_id for s in series):
            pairs = [(by_id[s.id], s) for s in series]
        else:
            pairs = list(zip(original.series, series))
        for a, b in pairs:
            print(f"{b.id}\tmse={mse(a, b):.6g}")
    return 0


def _inspect(args) -> int:
    cb = load_model(args.model)
    s = cb.scaling
    print(f"digitizer: {cb.digitizer_tag}")
    print(f"symbols:   {cb.k}")
    print(f"tol:       {cb.tol}")
    print(f"seed:      {cb.seed}")
    print(f"scaling:   scl={s.scl} sigma_len={s.sigma_len:.6g} sigma_inc={s.sigma_inc:.6g}")
    lens = cb.mean_lens
    incs = cb.centers[:, 1] * s.sigma_inc
    shown = min(cb.k, 10)
    for sym, l, i in zip(cb.symbols[:shown], lens[:shown], incs[:shown]):
        print(f"  {sym:>6}  len={l:.4g}  inc={i:.4g}")
    if cb.k > shown:
        print(f"  ... {cb.k - shown} more")
    return 0


def _emit(rows, args) -> None:
    print(bench.format_table(rows))
    if args.csv:
        bench.write_csv(rows, args.csv)
    if args.json_out:
        bench.dump_json(rows, args.json_out)


def _bench(args) -> int:
    if args.protocol == "partition-sweep":
        if args.input:
            ts = load_dataset(args.input, "csv-rows").series[0]
        else:
            ts = bench.gaussian_noise(args.n, args.seed)
        rows = bench.run_partition_sweep(
            ts, args.tol, backend=args.backend, alpha=args.alpha, k=args.k, r=args.r,
            partitions=args.partitions, threads=args.threads, seed=args.seed,
            repeats=args.repeats)
    else:
        if args.input:
            dataset = load_dataset(args.input, "ts-lite")
        else:
            dataset = bench.sinusoid_bundle(args.dims, args.length, args.seed)
        if not isinstance(dataset, Dataset) or dataset.layout != "multivariate":
            raise JabbaError("multivariate protocol needs multivariate input")
        rows = bench.run_multivariate_protocol(dataset, args.tol, r=args.r, eta=args.eta,
                                               seed=args.seed, threads=args.threads,
                                               repeats=args.repeats)
    _emit(rows, args)
    return 0


COMMANDS = {"symbolize": _symbolize, "reconstruct": _reconstruct, "inspect": _inspect,
            "bench": _bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (JabbaError, OSError) as exc:
        print(f"jabba: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
