"""Retrieval and k-NN scoring against loop-based references."""

import numpy as np
import pytest

from durp.data import LabeledDataset
from durp.evaluate import EvalReport, evaluate_metric, knn_accuracy, map_score, ranking_map
from durp.synth import gaussian_blobs

from oracles import naive_knn, naive_map


def random_metric(rng, d):
    A = rng.normal(size=(d, d))
    return A @ A.T


def test_ranking_map_matches_naive():
    for seed in range(8):
        rng = np.random.default_rng(seed)
        data = gaussian_blobs(5, 30, 3, seed=seed)
        M = random_metric(rng, 5)
        score, included, excluded = ranking_map(M, data)
        ref_score, ref_inc, ref_exc = naive_map(M, data.points, data.labels)
        assert score == ref_score
        assert (included, excluded) == (ref_inc, ref_exc)
        assert excluded == 0
        assert map_score(M, data) == score


def test_ranking_map_excludes_singleton_classes():
    rng = np.random.default_rng(0)
    points = rng.normal(size=(3, 5))
    labels = np.array([0, 0, 1, 1, 2])  # class 2 has a single member
    data = LabeledDataset(points, labels)
    M = np.eye(3)
    score, included, excluded = ranking_map(M, data)
    assert included == 4
    assert excluded == 1
    ref = naive_map(M, points, labels)
    assert (score, included, excluded) == ref


def test_ranking_map_validation():
    rng = np.random.default_rng(1)
    one = LabeledDataset(rng.normal(size=(2, 1)), np.array([0]))
    with pytest.raises(ValueError, match="two test points"):
        ranking_map(np.eye(2), one)
    singletons = LabeledDataset(rng.normal(size=(2, 3)), np.array([0, 1, 2]))
    with pytest.raises(ValueError, match="same-class candidate"):
        ranking_map(np.eye(2), singletons)


def test_knn_matches_naive():
    for seed in range(8):
        rng = np.random.default_rng(seed)
        train = gaussian_blobs(4, 40, 3, seed=seed)
        test = gaussian_blobs(4, 15, 3, seed=seed + 100)
        M = random_metric(rng, 4)
        for k in (1, 3, 5):
            acc = knn_accuracy(M, train, test, k)
            ref = naive_knn(M, train.points, train.labels, test.points, test.labels, k)
            assert acc == ref


def test_knn_distance_tie_prefers_smaller_train_index():
    # two training points equidistant from the query; index 0 must win
    train = LabeledDataset(
        np.array([[1.0, -1.0, 5.0]]), np.array([1, 0, 0])
    )
    test = LabeledDataset(np.array([[0.0]]), np.array([1]))
    assert knn_accuracy(np.eye(1), train, test, 1) == 1.0
    flipped = LabeledDataset(np.array([[1.0, -1.0, 5.0]]), np.array([0, 1, 1]))
    assert knn_accuracy(np.eye(1), flipped, test, 1) == 0.0


def test_knn_vote_tie_prefers_smallest_class():
    # k=2 sees one vote for class 0 and one for class 1; class 0 must win
    train = LabeledDataset(
        np.array([[0.5, 1.5, 9.0]]), np.array([1, 0, 0])
    )
    test = LabeledDataset(np.array([[1.0, 1.0]]), np.array([0, 1]))
    acc = knn_accuracy(np.eye(1), train, test, 2)
    assert acc == 0.5  # query labeled 0 is right, query labeled 1 is wrong


def test_knn_validation():
    train = gaussian_blobs(3, 10, 2, seed=0)
    test = gaussian_blobs(3, 4, 2, seed=1)
    with pytest.raises(ValueError, match="k must be in"):
        knn_accuracy(np.eye(3), train, test, 0)
    with pytest.raises(ValueError, match="k must be in"):
        knn_accuracy(np.eye(3), train, test, 11)
    wide = gaussian_blobs(4, 4, 2, seed=2)
    with pytest.raises(ValueError, match="dimensions differ"):
        knn_accuracy(np.eye(3), train, wide, 1)


def test_eval_report_round_trip():
    train = gaussian_blobs(4, 30, 3, seed=3)
    test = gaussian_blobs(4, 12, 3, seed=4)
    report = evaluate_metric(np.eye(4), train, test, k=3)
    text = report.to_json()
    assert '"map"' in text
    back = EvalReport.from_json(text)
    assert back == report
    assert report.n_queries + report.excluded_queries == test.n
