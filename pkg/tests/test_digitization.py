import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from jabba.compression import compress
from jabba.core import PieceSequence
from jabba.digitization import (GAConfig, VQConfig, apply_codebook, auto_alpha, compression_rate,
                                d2_seed, digitize, greedy_aggregate, kmeans, sampling_kmeans,
                                scale_pieces)
from jabba.digitization.vq import cluster_means, lloyd, nearest_center
from jabba.errors import InvalidInput, InvalidK, InvalidR
from oracles import auto_alpha_mp, optimal_sse, partition_sse

points_2d = arrays(np.float64, st.tuples(st.integers(1, 60), st.just(2)),
                   elements=st.floats(-100, 100, allow_nan=False))


# -- scaling ------------------------------------------------------------------

def test_scaling_uses_sample_std_and_scl():
    pieces = np.array([[1, 2.0], [3, -1.0], [5, 0.5]])
    pts, params = scale_pieces(pieces, 2.0)
    assert params.sigma_len == pytest.approx(np.std([1, 3, 5], ddof=1))
    assert params.sigma_inc == pytest.approx(np.std([2.0, -1.0, 0.5], ddof=1))
    assert np.allclose(pts[:, 0], 2.0 * pieces[:, 0] / params.sigma_len)
    zero, _ = scale_pieces(pieces, 0.0)
    assert np.all(zero[:, 0] == 0)


def test_unit_std_pieces_map_to_themselves():
    pieces = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    pts, params = scale_pieces(pieces, 1.0)
    assert params.sigma_len == params.sigma_inc == 1.0
    assert np.array_equal(pts, pieces)


def test_constant_lengths_cluster_like_increments_only():
    rng = np.random.default_rng(4)
    incs = rng.standard_normal(200)
    seq = PieceSequence(np.full(200, 3), incs, 0.0)
    _, params = scale_pieces(seq, 1.0)
    assert params.sigma_len == 1.0
    for backend, kw in (("ga", {"alpha": 0.3}), ("vq", {"k": 6, "seed": 1})):
        _, with_len = digitize(seq, backend, 1.0, **kw)
        _, inc_only = digitize(seq, backend, 0.0, **kw)
        assert with_len.strings == inc_only.strings


# -- D^2 seeding --------------------------------------------------------------

def test_d2_seed_k_equals_n_returns_every_point():
    pts = np.random.default_rng(0).standard_normal((12, 2))
    _, idx = d2_seed(pts, 12, 3, return_index=True)
    assert sorted(idx.tolist()) == list(range(12))


def test_d2_seed_collapsed_location():
    pts = np.zeros((5, 2)) + [1.5, -2.0]
    assert d2_seed(pts, 1, 0).tolist() == [[1.5, -2.0]]


def test_d2_seed_never_picks_covered_points_while_others_remain():
    pts = np.repeat(np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 7.0], [3.0, 3.0]]), 5, axis=0)
    for seed in range(200):
        centers = d2_seed(pts, 4, seed)
        assert len({tuple(c) for c in centers}) == 4
    with pytest.raises(InvalidK):
        d2_seed(pts, 21, 0)


def test_d2_seed_one_center_per_separated_blob():
    rng = np.random.default_rng(0)
    pts = np.vstack([rng.normal(0, 1, (50, 2)), rng.normal(100, 1, (50, 2))])
    hits = 0
    for seed in range(1000):
        _, idx = d2_seed(pts, 2, seed, return_index=True)
        hits += (idx[0] < 50) != (idx[1] < 50)
    assert hits / 1000 >= 0.95


# -- k-means --------------------------------------------------------------------

def test_kmeans_on_k_locations_is_exact():
    locs = np.array([[0.0, 0.0], [4.0, 1.0], [-3.0, 2.0]])
    pts = np.repeat(locs, 4, axis=0)
    labels, centers = kmeans(pts, VQConfig(3, seed=2))
    assert partition_sse(pts, labels) == 0.0
    assert len(np.unique(labels)) == 3


def test_kmeans_square_matches_brute_force():
    square = np.array([[0.0, 0.0], [0.0, 1.0], [2.0, 0.0], [2.0, 1.0]])
    opt = optimal_sse(square, 2)
    for seed in range(20):
        labels, _ = kmeans(square, VQConfig(2, n_init=10, seed=seed))
        assert partition_sse(square, labels) == pytest.approx(opt)


@pytest.mark.parametrize("seed", range(8))
def test_lloyd_fixpoint_and_monotone_sse(seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((300, 2))
    init = pts[rng.choice(300, 7, replace=False)]
    labels, centers, history = lloyd(pts, init)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(history, history[1:]))
    for j in range(7):
        assert np.allclose(centers[j], pts[labels == j].mean(axis=0), rtol=0, atol=1e-12)
    assert np.array_equal(nearest_center(pts, centers)[0], labels)


def test_cluster_means_repairs_empty_clusters():
    pts = np.array([[0.0], [1.0], [10.0]])
    centers, labels = cluster_means(pts, np.array([0, 0, 0]), 2,
                                    dist2=np.array([1.0, 0.5, 80.0]))
    assert labels.tolist() == [0, 0, 1]
    assert centers.ravel().tolist() == [0.5, 10.0]


def test_sampling_kmeans():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((1000, 2))
    labels, centers = sampling_kmeans(pts, VQConfig(1, r=0.2, seed=3))
    assert np.all(labels == 0)
    assert np.allclose(centers[0], pts.mean(axis=0), atol=0.2)
    with pytest.raises(InvalidR):
        sampling_kmeans(pts[:20], VQConfig(5, r=0.1, seed=0))
    with pytest.raises(InvalidR):
        VQConfig(2, r=0.0)
    lab, cen = sampling_kmeans(pts, VQConfig(4, r=0.3, seed=0))
    assert np.array_equal(lab, nearest_center(pts, cen)[0])


# -- greedy aggregation ---------------------------------------------------------

def test_ga_single_group_and_singletons():
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [0.0, -0.1]])
    labels, starts, centers = greedy_aggregate(pts, 1.0)
    assert labels.tolist() == [0, 0, 0] and len(starts) == 1
    labels, _, centers = greedy_aggregate(pts, 0.01)
    assert len(np.unique(labels)) == 3 and partition_sse(pts, labels) == 0


@given(points_2d, st.sampled_from([0.05, 0.2, 1.0, 10.0]), st.sampled_from(["pca", "norm"]))
def test_ga_sse_bound_and_start_radius(pts, alpha, key):
    labels, starts, centers = greedy_aggregate(pts, GAConfig(alpha, key))
    k = len(starts)
    sse = float(((pts - centers[labels]) ** 2).sum())
    assert sse <= alpha ** 2 * (len(pts) - k)
    assert np.all(((pts - pts[starts][labels]) ** 2).sum(axis=1) <= alpha ** 2)


@given(points_2d, st.sampled_from([0.05, 0.2, 1.0, 10.0]), st.sampled_from(["pca", "norm"]))
def test_ga_early_stop_changes_nothing(pts, alpha, key):
    on = greedy_aggregate(pts, GAConfig(alpha, key), early_stop=True)
    off = greedy_aggregate(pts, GAConfig(alpha, key), early_stop=False)
    assert np.array_equal(on[0], off[0]) and np.array_equal(on[1], off[1])


@given(arrays(np.float64, st.tuples(st.integers(1, 30), st.integers(1, 3)),
              elements=st.floats(-50, 50, allow_nan=False)),
       st.floats(-60, 60, allow_nan=False))
def test_mean_minimizes_energy(pts, shift):
    # energy about any member p equals energy about the mean plus |S| times the squared offset
    mu = pts.mean(axis=0)
    base = ((pts - mu) ** 2).sum()
    for p in pts[:5]:
        lhs = ((pts - p) ** 2).sum()
        rhs = base + len(pts) * ((p - mu) ** 2).sum()
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * (1 + (pts ** 2).sum()))


# -- auto alpha -----------------------------------------------------------------

@pytest.mark.parametrize("n,N", [(100_000, 10_000), (2_000, 300), (50, 7), (10**7, 12345)])
@pytest.mark.parametrize("tol", [1e-4, 0.01, 0.3, 2.0])
@pytest.mark.parametrize("eta", [0.5, 1.0, 3.0])
def test_auto_alpha_matches_high_precision(n, N, tol, eta):
    assert auto_alpha(n, N, tol, eta) == pytest.approx(float(auto_alpha_mp(n, N, tol, eta)),
                                                       rel=1e-12)


def test_auto_alpha_homogeneous_and_validated():
    a = auto_alpha(5000, 800, 0.02)
    assert auto_alpha(5000, 800, 0.08) == pytest.approx(2 * a, rel=1e-12)
    for bad in ((10, 10, 0.1), (10, 0, 0.1), (10, 3, 0.0)):
        with pytest.raises(InvalidInput):
            auto_alpha(*bad)
    with pytest.raises(InvalidInput):
        auto_alpha(10, 3, 0.1, eta=0.0)


def test_compression_rate():
    assert compression_rate(358, 100_000) == pytest.approx(0.99642)
    assert compression_rate(0, 10) == 1.0
    with pytest.raises(InvalidInput):
        compression_rate(10, 10)


# -- digitize -------------------------------------------------------------------

def _walk_pieces(seed, n=600, tol=0.2):
    return compress(np.cumsum(np.random.default_rng(seed).standard_normal(n)), tol)


def test_k_distinct_pieces_are_recovered_exactly():
    base = np.array([[1, 0.5], [2, -1.0], [3, 2.0], [1, -0.25]])
    rows = base[np.random.default_rng(0).integers(0, 4, 40)]
    seq = PieceSequence(rows[:, 0].astype(int), rows[:, 1], 0.0)
    cb, res = digitize(seq, "vq", 1.0, k=4, seed=0)
    assert cb.k == 4
    from jabba.inverse import inverse_digitize
    ap = inverse_digitize(res)[0]
    assert np.allclose(ap.lens, rows[:, 0]) and np.allclose(ap.incs, rows[:, 1])


@pytest.mark.parametrize("backend,kw", [
    ("vq", {"k": 9}), ("sampling-vq", {"k": 9, "r": 0.5}), ("ga", {"alpha": 0.4}),
    ("ga-auto", {"tol": 0.2}), ("ga-hierarchical", {"alpha": 0.4})])
def test_digitize_properties(backend, kw):
    seqs = [_walk_pieces(s) for s in range(3)]
    cb, res = digitize(seqs, backend, 1.0, seed=5, **kw)
    labels = np.concatenate(res.labels)
    pts, _ = scale_pieces(seqs, 1.0)
    # every piece carries its nearest center; every center is its cluster mean
    assert np.array_equal(nearest_center(pts, cb.centers)[0], labels)
    for j in range(cb.k):
        assert np.allclose(cb.centers[j], pts[labels == j].mean(axis=0), atol=1e-12)
    counts = np.bincount(labels, minlength=cb.k)
    assert np.all(np.diff(counts) <= 0)
    assert [len(s) for s in res.strings] == [len(s) for s in seqs]
    for s, l in zip(res.strings, res.labels):
        assert cb.decode(s).tolist() == l.tolist()
    if backend == "ga-hierarchical":
        assert cb.k <= len(labels)


def test_identical_series_get_identical_strings():
    a = _walk_pieces(1)
    b = PieceSequence(a.lens, a.incs, a.anchor, "copy", a.source_length)
    for backend, kw in (("ga", {"alpha": 0.5}), ("vq", {"k": 6})):
        cb, res = digitize([a, _walk_pieces(2), b], backend, seed=0, **kw)
        assert res.strings[0] == res.strings[2]
        assert apply_codebook(cb, a).strings[0] == res.strings[0]


def test_scl_zero_ignores_length_scale():
    seq = _walk_pieces(3)
    stretched = PieceSequence(seq.lens * 7, seq.incs, seq.anchor)
    for backend, kw in (("ga", {"alpha": 0.3}), ("vq", {"k": 5, "seed": 2})):
        _, r1 = digitize(seq, backend, 0.0, **kw)
        _, r2 = digitize(stretched, backend, 0.0, **kw)
        assert r1.strings == r2.strings


def test_digitize_is_seed_deterministic():
    seqs = [_walk_pieces(s) for s in range(2)]
    r1 = digitize(seqs, "sampling-vq", k=7, r=0.4, seed=11)[1]
    r2 = digitize(seqs, "sampling-vq", k=7, r=0.4, seed=11)[1]
    assert r1 == r2


def test_digitize_errors():
    seq = _walk_pieces(0)
    with pytest.raises(InvalidInput):
        digitize(seq, "dbscan")
    with pytest.raises(InvalidInput):
        digitize(seq, "vq")
    with pytest.raises(InvalidInput):
        digitize(seq, "ga")
    with pytest.raises(InvalidInput):
        digitize(seq, "ga-auto")
    with pytest.raises(InvalidInput):
        digitize([], "ga", alpha=1.0)
    with pytest.raises(InvalidK):
        digitize(seq, "vq", k=10_000)
