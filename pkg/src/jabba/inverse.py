"""Symbols back to series: centers, quantized lengths, polygonal chain."""

from __future__ import annotations

from math import fsum
from typing import NamedTuple

import numpy as np

from .compression import inverse_compress, stitch
from .core import Codebook, PieceSequence, SymbolicResult, TimeSeries
from .errors import InvalidInput


class ApproxPieces(NamedTuple):
    """Reconstructed pieces before quantization; ``lens`` are real-valued."""

    lens: np.ndarray
    incs: np.ndarray
    anchor: float
    source_length: int
    source_id: str
    offset: int


def center_pieces(codebook: Codebook) -> tuple[np.ndarray, np.ndarray]:
    """Raw-unit (len, inc) of every codebook center."""
    s = codebook.scaling
    if s.scl > 0:
        lens = codebook.centers[:, 0] * s.sigma_len / s.scl
    else:
        lens = codebook.mean_lens.copy()
    incs = codebook.centers[:, 1] * s.sigma_inc
    return lens, incs


def inverse_digitize(symbolic: SymbolicResult) -> list[ApproxPieces]:
    """Replace every token by its center, mapped back to raw (len, inc) units."""
    codebook = symbolic.codebook
    c_lens, c_incs = center_pieces(codebook)
    out = []
    for i, tokens in enumerate(symbolic.strings):
        labels = codebook.decode(tokens)
        out.append(ApproxPieces(c_lens[labels], c_incs[labels], symbolic.anchors[i],
                                symbolic.source_lengths[i], symbolic.ids[i],
                                symbolic.offsets[i]))
    return out


def quantize_lengths(lens, total: int | None = None) -> np.ndarray:
    """Round real lengths to integers >= 1, carrying the rounding error forward.

    Every prefix sum of the result stays within 0.5 of the real prefix sum as
    long as no length needs clamping up to 1.  With ``total`` the result is
    adjusted from the last piece backwards to sum to exactly ``total``.
    """
    lens = np.asarray(lens, dtype=np.float64)
    if np.any(~np.isfinite(lens)) or np.any(lens < 0):
        raise InvalidInput("lengths must be finite and nonnegative")
    out = np.empty(len(lens), np.int64)
    carry = 0.0
    for j, l in enumerate(lens):
        target = l + carry
        q = int(np.floor(target + 0.5))
        if q < 1:
            q = 1
        out[j] = q
        carry = target - q
    if total is not None:
        if total < len(out):
            raise InvalidInput(f"cannot fit {len(out)} pieces of length >= 1 into {total}")
        diff = int(total) - int(out.sum())
        j = len(out) - 1
        while diff != 0:
            if diff > 0:
                out[j] += diff
                diff = 0
            else:
                take = min(out[j] - 1, -diff)
                out[j] -= take
                diff += take
                j -= 1
    return out


def inverse_symbolize(symbolic: SymbolicResult, stitch_segments: bool = True) -> list[TimeSeries]:
    """Reconstruct series from their symbols.

    Segments of a partitioned series are stitched back into one series unless
    ``stitch_segments`` is False, in which case one series per unit is returned.
    """
    recons = []
    for ap in inverse_digitize(symbolic):
        lens = quantize_lengths(ap.lens, ap.source_length)
        seq = PieceSequence(lens, ap.incs, ap.anchor, ap.source_id, ap.source_length, ap.offset)
        recons.append(inverse_compress(seq))
    if not stitch_segments:
        return [TimeSeries(r, id=i) for r, i in zip(recons, symbolic.ids)]
    return [TimeSeries(v, id=sid) for sid, v in stitch(recons, symbolic.ids, symbolic.offsets)]


def reconstructed_inc_total(symbolic: SymbolicResult) -> float:
    """Sum of all reconstructed increments over the whole fit."""
    return fsum(np.concatenate([ap.incs for ap in inverse_digitize(symbolic)]))


def chain_reconstruction(symbolic: SymbolicResult) -> np.ndarray:
    """One polygonal chain through every reconstructed piece of the fit, in unit
    order, starting from the first unit's anchor.

    With mean-based centers its last value equals the first anchor plus the
    sum of all original increments.
    """
    aps = inverse_digitize(symbolic)
    lens = quantize_lengths(np.concatenate([ap.lens for ap in aps]),
                            sum(ap.source_length for ap in aps))
    incs = np.concatenate([ap.incs for ap in aps])
    seq = PieceSequence(lens, incs, aps[0].anchor, aps[0].source_id, int(lens.sum()))
    return inverse_compress(seq)
