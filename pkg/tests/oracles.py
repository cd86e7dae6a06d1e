"""Independent reference implementations used to cross-check the package.

Everything here is written for clarity over speed: explicit loops,
explicit d x d matrices, textbook formulas.  Unit and acceptance tests
compare the fast production paths against these.
"""

import numpy as np


def triplet_matrix(u, v):
    """The explicit d x d constraint matrix u u^T - v v^T."""
    return np.outer(u, u) - np.outer(v, v)


def dense_trace_gram(U, V):
    """Gram matrix via explicit trace(A_a A_b) on materialized matrices."""
    n = U.shape[1]
    mats = [triplet_matrix(U[:, t], V[:, t]) for t in range(n)]
    G = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            G[a, b] = np.trace(mats[a] @ mats[b])
    return G


def naive_accumulator(U, V, alpha):
    """Sum of alpha_t A_t by explicit loop over triplets."""
    d = U.shape[0]
    S = np.zeros((d, d))
    for t in range(U.shape[1]):
        S += alpha[t] * triplet_matrix(U[:, t], V[:, t])
    return S


def naive_recover(alpha, U, V, lam):
    """Metric -(1 / (lam N)) sum_t alpha_t A_t by explicit loop."""
    n = U.shape[1]
    return -naive_accumulator(U, V, alpha) / (lam * n)


def naive_primal(M, U, V, loss_value, lam):
    """Primal objective with explicit per-triplet quadratic forms.

    ``loss_value`` maps a margin scalar to its loss value.
    """
    n = U.shape[1]
    total = 0.0
    for t in range(n):
        z = U[:, t] @ M @ U[:, t] - V[:, t] @ M @ V[:, t]
        total += loss_value(z)
    return 0.5 * lam * np.linalg.norm(M, "fro") ** 2 + total / n


def spectral_norm(A):
    """Largest singular value via numpy's SVD-backed matrix norm."""
    return float(np.linalg.norm(A, 2))


def naive_sq_distance(M, x, y):
    """(x - y)^T M (x - y) by explicit matrix-vector products."""
    diff = x - y
    return float(diff @ M @ diff)


def naive_map(M, points, labels):
    """Mean average precision with explicit loops.

    For every query with at least one other same-class point, ranks the
    remaining points by squared metric distance (stable order on ties),
    accumulates precision at every relevant hit, and averages.  Returns
    (map, n_included, n_excluded).
    """
    n = points.shape[1]
    ap_values = []
    excluded = 0
    for q in range(n):
        others = [t for t in range(n) if t != q]
        relevant = [t for t in others if labels[t] == labels[q]]
        if not relevant:
            excluded += 1
            continue
        dists = np.array([naive_sq_distance(M, points[:, q], points[:, t]) for t in others])
        order = np.argsort(dists, kind="stable")
        hits = 0
        precisions = []
        for rank, idx in enumerate(order, start=1):
            if labels[others[idx]] == labels[q]:
                hits += 1
                precisions.append(hits / rank)
        ap_values.append(sum(precisions) / len(precisions))
    if not ap_values:
        return 0.0, 0, excluded
    return sum(ap_values) / len(ap_values), len(ap_values), excluded


def naive_knn(M, train_points, train_labels, test_points, test_labels, k):
    """k-NN accuracy with explicit loops and documented tie rules.

    Neighbor ties on distance resolve to the smaller training index
    (stable sort); vote ties resolve to the smallest class id.
    """
    n_train = train_points.shape[1]
    n_test = test_points.shape[1]
    correct = 0
    for q in range(n_test):
        dists = np.array(
            [naive_sq_distance(M, test_points[:, q], train_points[:, t]) for t in range(n_train)]
        )
        order = np.argsort(dists, kind="stable")[:k]
        votes = {}
        for idx in order:
            votes[int(train_labels[idx])] = votes.get(int(train_labels[idx]), 0) + 1
        best = max(votes.values())
        predicted = min(c for c, count in votes.items() if count == best)
        if predicted == int(test_labels[q]):
            correct += 1
    return correct / n_test
