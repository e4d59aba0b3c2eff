"""Symbolic representation of many time series over one shared alphabet.

Series are compressed into (len, inc) pieces by an adaptive polygonal chain,
the pieces of many series (or of many partitions of one series) are clustered
into one shared codebook, and every piece is replaced by a symbol.  Symbols map
back to a reconstruction whose start and end values are preserved.
"""

from .compression import (CompressionConfig, PartitionedPieces, compress, inverse_compress,
                          partitional_compress)
from .core import (BenchReport, Codebook, Dataset, Piece, PieceSequence, ScalingParams,
                   SymbolicResult, TimeSeries)
from .digitization import (AutoDigitizeConfig, GAConfig, VQConfig, apply_codebook, auto_alpha,
                           compression_rate, d2_seed, digitize, greedy_aggregate, kmeans,
                           sampling_kmeans, scale_pieces)
from .errors import JabbaError
from .inverse import chain_reconstruction, inverse_digitize, inverse_symbolize, quantize_lengths
from .metrics import ami, dtw, mse, speedup, sse
from .pipeline import reconstruct, symbolize, symbolize_with

__all__ = [
    "AutoDigitizeConfig", "BenchReport", "Codebook", "CompressionConfig", "Dataset", "GAConfig",
    "JabbaError", "PartitionedPieces", "Piece", "PieceSequence", "ScalingParams",
    "SymbolicResult", "TimeSeries", "VQConfig", "ami", "apply_codebook", "auto_alpha",
    "chain_reconstruction", "compress", "compression_rate", "d2_seed", "digitize", "dtw",
    "greedy_aggregate", "inverse_compress", "inverse_digitize", "inverse_symbolize", "kmeans",
    "mse", "partitional_compress", "quantize_lengths", "reconstruct", "sampling_kmeans",
    "scale_pieces", "speedup", "sse", "symbolize", "symbolize_with",
]

__version__ = "0.1.0"
