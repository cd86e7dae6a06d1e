"""Active-triplet sampling and the difference-vector cache."""

import numpy as np
import pytest

from durp.data import LabeledDataset
from durp.projection import gaussian_matrix, identity_matrix
from durp.synth import gaussian_blobs
from durp.triplets import (
    TripletCache,
    TripletSet,
    build_cache,
    load_triplets,
    project_cache,
    sample_active_triplets,
    save_triplets,
)


def test_triplet_set_validation():
    ts = TripletSet(np.array([[0, 1, 2]]))
    assert ts.n == 1
    with pytest.raises(ValueError):
        TripletSet(np.zeros((3, 2), dtype=np.int64))
    with pytest.raises(ValueError):
        TripletSet(np.zeros(3, dtype=np.int64))


def test_sampled_triplets_are_valid_and_active():
    for seed in range(5):
        data = gaussian_blobs(6, 60, 3, seed=seed, noise=0.2)
        ts = sample_active_triplets(data, 200, seed=seed)
        tri = ts.triplets
        assert tri.shape == (200, 3)
        i, j, k = tri.T
        assert np.all(data.labels[i] == data.labels[j])
        assert np.all(data.labels[i] != data.labels[k])
        assert np.all(i != j)
        u = data.points[:, i] - data.points[:, k]
        v = data.points[:, i] - data.points[:, j]
        slack = 1.0 + np.einsum("dt,dt->t", v, v) - np.einsum("dt,dt->t", u, u)
        assert np.all(slack > 0)  # Euclidean-active by construction


def test_sampling_is_deterministic_per_seed():
    data = gaussian_blobs(5, 40, 2, seed=0)
    a = sample_active_triplets(data, 50, seed=3)
    b = sample_active_triplets(data, 50, seed=3)
    c = sample_active_triplets(data, 50, seed=4)
    assert np.array_equal(a.triplets, b.triplets)
    assert not np.array_equal(a.triplets, c.triplets)


def test_sampling_validates_class_structure():
    lone = LabeledDataset(np.ones((2, 3)), np.array([0, 0, 0]))
    with pytest.raises(ValueError, match="two distinct classes"):
        sample_active_triplets(lone, 5, seed=0)
    singletons = LabeledDataset(np.eye(2), np.array([0, 1]))
    with pytest.raises(ValueError, match="two or more members"):
        sample_active_triplets(singletons, 5, seed=0)
    data = gaussian_blobs(4, 20, 2, seed=0)
    with pytest.raises(ValueError, match="nonnegative"):
        sample_active_triplets(data, -1, seed=0)


def test_sampling_reports_dead_instances():
    # classes so far apart that no Euclidean-active triplet exists
    points = np.zeros((2, 8))
    points[0, 4:] = 100.0
    data = LabeledDataset(points, np.array([0] * 4 + [1] * 4))
    with pytest.raises(ValueError, match="acceptance rate"):
        sample_active_triplets(data, 10, seed=0, max_draw_factor=20)


def test_sampling_zero_triplets():
    data = gaussian_blobs(4, 20, 2, seed=0)
    ts = sample_active_triplets(data, 0, seed=0)
    assert ts.n == 0


def test_cache_matches_naive_differences():
    data = gaussian_blobs(7, 50, 3, seed=1, noise=0.3)
    ts = sample_active_triplets(data, 80, seed=1)
    cache = build_cache(data, ts)
    assert cache.space_dim == 7 and cache.n == 80
    for t in range(0, 80, 7):
        i, j, k = ts.triplets[t]
        u = data.points[:, i] - data.points[:, k]
        v = data.points[:, i] - data.points[:, j]
        assert np.array_equal(cache.U[:, t], u)
        assert np.array_equal(cache.V[:, t], v)
        assert np.isclose(cache.uu_norms[t], u @ u, rtol=1e-14)
        assert np.isclose(cache.vv_norms[t], v @ v, rtol=1e-14)


def test_cache_validation():
    with pytest.raises(ValueError, match="matching shapes"):
        TripletCache(np.zeros((3, 4)), np.zeros((3, 5)), np.zeros(4), np.zeros(4))
    with pytest.raises(ValueError, match="one entry per triplet"):
        TripletCache(np.zeros((3, 4)), np.zeros((3, 4)), np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError, match="nonnegative"):
        TripletCache(np.zeros((3, 4)), np.zeros((3, 4)), -np.ones(4), np.zeros(4))
    data = gaussian_blobs(4, 20, 2, seed=0)
    with pytest.raises(ValueError, match="out of range"):
        build_cache(data, TripletSet(np.array([[0, 1, 99]])))


def test_cache_arrays_are_c_contiguous():
    data = gaussian_blobs(6, 30, 2, seed=2)
    ts = sample_active_triplets(data, 40, seed=2)
    cache = build_cache(data, ts)
    assert cache.U.flags["C_CONTIGUOUS"] and cache.V.flags["C_CONTIGUOUS"]
    projected = project_cache(cache, gaussian_matrix(6, 3, seed=0))
    assert projected.U.flags["C_CONTIGUOUS"] and projected.V.flags["C_CONTIGUOUS"]


def test_project_cache_applies_projection():
    data = gaussian_blobs(8, 30, 2, seed=3)
    ts = sample_active_triplets(data, 40, seed=3)
    cache = build_cache(data, ts)
    proj = gaussian_matrix(8, 4, seed=1)
    projected = project_cache(cache, proj)
    assert projected.space_dim == 4 and projected.n == 40
    assert np.allclose(projected.U, proj.entries.T @ cache.U)
    assert np.allclose(projected.V, proj.entries.T @ cache.V)
    with pytest.raises(ValueError):
        project_cache(cache, gaussian_matrix(9, 4, seed=1))


def test_identity_projection_preserves_cache_bits():
    data = gaussian_blobs(6, 30, 2, seed=4)
    ts = sample_active_triplets(data, 40, seed=4)
    cache = build_cache(data, ts)
    projected = project_cache(cache, identity_matrix(6))
    assert np.array_equal(projected.U, cache.U)
    assert np.array_equal(projected.V, cache.V)
    assert np.array_equal(projected.uu_norms, cache.uu_norms)
    assert np.array_equal(projected.vv_norms, cache.vv_norms)


def test_triplets_csv_round_trip(tmp_path):
    ts = TripletSet(np.array([[0, 1, 2], [3, 4, 5]]))
    path = tmp_path / "triplets.csv"
    save_triplets(path, ts)
    text = path.read_text()
    assert text.splitlines()[0] == "i,j,k"
    back = load_triplets(path)
    assert np.array_equal(back.triplets, ts.triplets)
    path.write_text("x,y,z\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        load_triplets(path)
