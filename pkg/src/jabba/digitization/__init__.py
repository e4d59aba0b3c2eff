from .aggregation import GAConfig, greedy_aggregate, sort_keys
from .digitize import (
    BACKENDS,
    AutoDigitizeConfig,
    apply_codebook,
    assign,
    auto_alpha,
    compression_rate,
    digitize,
    scale_pieces,
)
from .vq import VQConfig, d2_seed, kmeans, lloyd, nearest_center, sampling_kmeans

__all__ = [
    "BACKENDS", "AutoDigitizeConfig", "GAConfig", "VQConfig", "apply_codebook", "assign",
    "auto_alpha", "compression_rate", "d2_seed", "digitize", "greedy_aggregate", "kmeans",
    "lloyd", "nearest_center", "sampling_kmeans", "scale_pieces", "sort_keys",
]
