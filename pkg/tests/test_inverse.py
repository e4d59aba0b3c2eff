import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jabba.compression import compress, inverse_compress
from jabba.core import Codebook, PieceSequence, ScalingParams, SymbolicResult
from jabba.digitization import digitize
from jabba.errors import InvalidInput, UnknownSymbol
from jabba.inverse import (center_pieces, chain_reconstruction, inverse_digitize,
                           inverse_symbolize, quantize_lengths)
from jabba.metrics import mse
from jabba.pipeline import reconstruct, symbolize


def test_quantize_carries_error():
    assert quantize_lengths([1.4] * 5).tolist() == [1, 2, 1, 2, 1]
    assert quantize_lengths([3.0, 1.0, 7.0]).tolist() == [3, 1, 7]


def test_quantize_clamps_to_one_and_hits_total():
    # 0.2 -> 1 (carry -0.8); -0.6 -> 1 (carry -1.6); 3.4 -> 3
    assert quantize_lengths([0.2, 0.2, 5.0]).tolist() == [1, 1, 3]
    assert quantize_lengths([2.2, 2.2, 2.2], total=9).tolist() == [2, 2, 5]
    assert quantize_lengths([2.8, 2.8, 2.8], total=4).tolist() == [2, 1, 1]
    with pytest.raises(InvalidInput):
        quantize_lengths([1.0, 1.0], total=1)
    with pytest.raises(InvalidInput):
        quantize_lengths([-1.0])


@given(st.lists(st.floats(1.0, 50.0), min_size=1, max_size=200))
def test_quantize_prefix_bound(lens):
    q = quantize_lengths(lens)
    assert np.all(q >= 1)
    assert np.all(np.abs(np.cumsum(q) - np.cumsum(lens)) <= 0.5 + 1e-9)


@given(st.lists(st.floats(0.0, 20.0), min_size=1, max_size=100), st.integers(0, 50))
def test_quantize_total_is_exact(lens, extra):
    total = len(lens) + extra
    q = quantize_lengths(lens, total)
    assert q.sum() == total and np.all(q >= 1)


def test_exact_centers_reconstruct_exactly():
    values = np.array([0.0, 1.0, 2.0, 1.0, 0.0, 2.0, 4.0, 3.0, 2.0])
    seq = compress(values, 1e-6)
    res = symbolize(values, 1e-6, "ga", alpha=1e-9)
    assert res.n_symbols == len({(l, i) for l, i in zip(seq.lens, seq.incs)})
    assert np.allclose(reconstruct(res)[0].values, values, atol=1e-12)


def test_scl_zero_uses_stored_mean_lengths():
    values = np.cumsum(np.random.default_rng(0).standard_normal(500))
    seq = compress(values, 0.3)
    cb, res = digitize(seq, "ga", 0.0, alpha=0.5)
    labels = res.labels[0]
    expected = [seq.lens[labels == j].mean() for j in range(cb.k)]
    lens, _ = center_pieces(cb)
    assert np.allclose(lens, expected)
    ap = inverse_digitize(res)[0]
    assert np.allclose(ap.lens, np.asarray(expected)[labels])


def test_unknown_symbol():
    cb = Codebook([[1.0, 1.0]], ("A",), ScalingParams(1, 1, 1), "ga", [1.0])
    good = SymbolicResult([("A",)], cb, [0.0], [1], [[0]], ["s"])
    other = Codebook([[1.0, 1.0]], ("B",), ScalingParams(1, 1, 1), "ga", [1.0])
    assert inverse_symbolize(good)[0].values.tolist() == [0.0, 1.0]
    bad = SymbolicResult([("B",)], other, [0.0], [1], [[0]], ["s"])
    object.__setattr__(bad, "codebook", cb)
    with pytest.raises(UnknownSymbol):
        inverse_symbolize(bad)


@pytest.mark.parametrize("backend,kw", [("vq", {"k": 6}), ("ga", {"alpha": 0.5}),
                                        ("sampling-vq", {"k": 6, "r": 0.6}),
                                        ("ga-hierarchical", {"alpha": 0.5}), ("ga-auto", {})])
def test_lengths_and_global_increment_sum(backend, kw):
    rng = np.random.default_rng(2)
    data = [np.cumsum(rng.standard_normal(n)) for n in (300, 450, 200)]
    res = symbolize(data, 0.2, backend, seed=1, **kw)
    recon = reconstruct(res)
    assert [len(r) for r in recon] == [len(d) for d in data]
    assert all(r.values[0] == d[0] for r, d in zip(recon, data))
    chain = chain_reconstruction(res)
    total = data[0][0] + sum(np.sum(np.diff(d)) for d in data)
    assert chain[0] == data[0][0]
    assert chain[-1] == pytest.approx(total, rel=1e-9, abs=1e-9)


def test_partitioned_chain_ends_at_original_value():
    values = np.cumsum(np.random.default_rng(5).standard_normal(3000))
    res = symbolize(values, 0.1, "ga", alpha=0.3, partitions=6)
    assert chain_reconstruction(res)[-1] == pytest.approx(values[-1], rel=1e-9, abs=1e-9)
    (whole,) = reconstruct(res)
    assert len(whole) == len(values) and whole.values[0] == values[0]


def test_mse_shrinks_as_alphabet_grows():
    walk = np.cumsum(np.random.default_rng(9).standard_normal(3000))
    errs = [mse(walk, reconstruct(symbolize(walk, 0.1, "vq", k=k, seed=0))[0])
            for k in (4, 16, 64)]
    assert errs[0] > errs[1] > errs[2]


def test_inverse_compress_accepts_quantized_lengths():
    seq = PieceSequence([2, 2], [1.0, 1.0], 0.0)
    assert np.allclose(inverse_compress(seq, lens=[1, 3]), [0.0, 1.0, 4 / 3, 5 / 3, 2.0])
