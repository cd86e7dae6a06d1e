"""Synthetic labeled datasets for the verification harnesses and tests."""

from __future__ import annotations

import numpy as np

from .data import LabeledDataset


def _round_robin_labels(n, n_classes):
    return np.arange(n, dtype=np.int64) % n_classes


def gaussian_blobs(d, n, n_classes, seed, mean_gap=3.0, noise=1.0):
    """Isotropic Gaussian blobs whose class means sit ``mean_gap * noise`` apart.

    Means are drawn isotropically with scale mean_gap * noise / sqrt(2 d),
    so the expected distance between two class means is mean_gap * noise.
    """
    if n_classes < 2 or n < 2 * n_classes:
        raise ValueError("need at least two classes with two points each")
    rng = np.random.default_rng(seed)
    means = rng.normal(0.0, mean_gap * noise / np.sqrt(2 * d), size=(d, n_classes))
    labels = _round_robin_labels(n, n_classes)
    points = means[:, labels] + rng.normal(0.0, noise, size=(d, n))
    return LabeledDataset(points, labels)


def rank_r_blobs(d, r, n, n_classes, seed, mean_gap=3.0, noise=1.0):
    """Blobs supported on an exactly rank-r subspace of R^d.

    Latent r-dimensional blobs are embedded through a random orthonormal
    d x r basis, so the point matrix has rank exactly r (a.s.).
    """
    if not 1 <= r <= d:
        raise ValueError("need 1 <= r <= d")
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.normal(size=(d, r)))
    means = rng.normal(0.0, mean_gap * noise / np.sqrt(2 * r), size=(r, n_classes))
    labels = _round_robin_labels(n, n_classes)
    latent = means[:, labels] + rng.normal(0.0, noise, size=(r, n))
    return LabeledDataset(basis @ latent, labels)


def _simplex_vertices(k):
    """k unit vectors in R^(k-1) with equal pairwise angles (a centered simplex)."""
    pts = np.eye(k) - 1.0 / k
    q, _ = np.linalg.qr(pts.T)
    verts = pts @ q[:, : k - 1]
    return (verts / np.linalg.norm(verts, axis=1, keepdims=True)).T


def margin_gapped_blobs(d, r, n, seed, scale=0.15, edge_mult=4.0, jitter=0.02):
    """Rank-r blobs whose learned-metric margins avoid the unit threshold.

    Three tight classes sit on a centered simplex of radius ``scale`` inside
    a random rank-r subspace; a fourth class sits further out along one edge
    direction of that simplex.  At the dual optimum the close-pair triplets
    are all strongly violated and the far-class triplets are all strongly
    satisfied, so the active set has a wide stability margin: moderate
    distortion of the triplet geometry leaves the optimal dual point (and
    hence the recovered metric) unchanged.  The recovery-trend harness
    relies on this to expose sketch-size effects instead of data noise.

    ``scale`` sets how violated the close pairs are (margins ~ 0.6 at the
    default), ``edge_mult`` how satisfied the far class is (margins >= 1.9
    at the default), and ``jitter`` the within-class spread relative to
    ``scale``.
    """
    if not 2 <= r <= d:
        raise ValueError("need 2 <= r <= d")
    if n < 8:
        raise ValueError("need at least two points per class")
    if scale <= 0 or edge_mult <= 0 or jitter <= 0:
        raise ValueError("scale, edge_mult and jitter must be positive")
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.normal(size=(d, r)))
    tri = _simplex_vertices(3)
    verts = np.zeros((r, 4))
    verts[:2, :3] = tri
    edge = tri[:, 0] - tri[:, 1]
    verts[:2, 3] = edge_mult * edge / np.linalg.norm(edge)
    means = scale * verts
    labels = _round_robin_labels(n, 4)
    latent = means[:, labels] + rng.normal(0.0, scale * jitter, size=(r, n))
    return LabeledDataset(basis @ latent, labels)


def isotropic_cloud(d, n, n_classes, seed):
    """Full-rank isotropic cloud with random labels, scaled for spectral checks.

    The per-coordinate scale sigma = (2 d^1.5)^(-1/2) makes squared
    difference norms concentrate near 1/sqrt(d), which puts the Gram
    spectral summary at the N/d magnitude the theory quotes for isotropic
    data.  Label structure is uninformative by design; these clouds
    exercise dual recovery, not generalization.
    """
    if n_classes < 2 or n < 2 * n_classes:
        raise ValueError("need at least two classes with two points each")
    rng = np.random.default_rng(seed)
    sigma = 1.0 / np.sqrt(2.0 * d**1.5)
    points = rng.normal(0.0, sigma, size=(d, n))
    labels = _round_robin_labels(n, n_classes)
    return LabeledDataset(points, labels)
