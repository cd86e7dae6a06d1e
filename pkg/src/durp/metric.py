"""Metric recovery, PSD projection, distances, and on-disk formats.

Recovery rebuilds the full-dimension metric from dual variables and the
*original* difference vectors, so only one PSD projection is ever needed
at the end of the pipeline.
"""

from __future__ import annotations

import struct

import numpy as np

SYMMETRY_TOL = 1e-8


def symmetrize(M):
    return 0.5 * (M + M.T)


def require_symmetric(M, tol=SYMMETRY_TOL):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(float(np.abs(M).max()), 1e-30) if M.size else 1.0
    skew = float(np.abs(M - M.T).max()) if M.size else 0.0
    if skew > tol * scale:
        raise ValueError(f"matrix is not symmetric (relative skew {skew / scale:.3e})")


def recover_metric(alpha, cache, lam):
    """M = -(1/(lam N)) sum_t alpha_t (u_t u_t^T - v_t v_t^T) over the cache's space."""
    n = cache.n
    if alpha.shape != (n,):
        raise ValueError("alpha must have one entry per triplet")
    if n == 0:
        raise ValueError("cannot recover a metric from an empty triplet cache")
    S = (cache.U * alpha) @ cache.U.T - (cache.V * alpha) @ cache.V.T
    return symmetrize(-S / (lam * n))


def assemble_subspace_metric(M_s, projection):
    """Push an m x m subspace metric back to d x d: R M_s R^T."""
    R = projection.entries
    if M_s.shape != (projection.m, projection.m):
        raise ValueError(
            f"subspace metric shape {M_s.shape} does not match projection width {projection.m}"
        )
    return symmetrize(R @ M_s @ R.T)


def psd_project(M):
    """Nearest positive-semidefinite matrix in Frobenius norm.

    Eigendecomposes the symmetrized input and clamps negative eigenvalues
    at zero.
    """
    require_symmetric(M)
    sym = symmetrize(M)
    eigvals, eigvecs = np.linalg.eigh(sym)
    clipped = np.maximum(eigvals, 0.0)
    return symmetrize((eigvecs * clipped) @ eigvecs.T)


def metric_distance(M, x, y):
    """Squared metric distance (x - y)^T M (x - y)."""
    delta = x - y
    return float(delta @ (M @ delta))


def pairwise_sq_distances(M, X, Y=None):
    """All squared metric distances between columns of X and Y (Y defaults to X).

    Assumes M symmetric, as everything in this module produces.
    """
    if Y is None:
        Y = X
    MY = M @ Y
    K = X.T @ MY
    x_q = np.einsum("pt,pt->t", X, M @ X)
    y_q = x_q if Y is X else np.einsum("pt,pt->t", Y, MY)
    return x_q[:, None] + y_q[None, :] - 2.0 * K


def save_metric(path, M):
    """Binary layout: q as u64 little-endian, then q*q f64, row-major, little-endian."""
    require_symmetric(M)
    q = M.shape[0]
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", q))
        fh.write(np.ascontiguousarray(M, dtype="<f8").tobytes())


def load_metric(path):
    """Read a metric written by :func:`save_metric`."""
    with open(path, "rb") as fh:
        header = fh.read(8)
        if len(header) != 8:
            raise ValueError("truncated metric file (missing dimension header)")
        (q,) = struct.unpack("<Q", header)
        payload = fh.read()
    expected = q * q * 8
    if len(payload) != expected:
        raise ValueError(f"metric payload has {len(payload)} bytes, expected {expected}")
    M = np.frombuffer(payload, dtype="<f8").reshape(q, q).astype(np.float64)
    return M


def save_metric_eigen(path, M, rank):
    """Factored variant: keeps the top ``rank`` eigenpairs by eigenvalue.

    Layout: q u64, r u64, r eigenvalues f64, then the q x r eigenvector
    block row-major f64 (all little-endian).  Loading rebuilds the
    rank-r approximation B diag(w) B^T.
    """
    require_symmetric(M)
    q = M.shape[0]
    if not 1 <= rank <= q:
        raise ValueError("rank must be in [1, q]")
    eigvals, eigvecs = np.linalg.eigh(symmetrize(M))
    order = np.argsort(eigvals)[::-1][:rank]
    w = eigvals[order]
    B = eigvecs[:, order]
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", q, rank))
        fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(B, dtype="<f8").tobytes())


def load_metric_eigen(path):
    """Rebuild the rank-r approximation stored by :func:`save_metric_eigen`."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise ValueError("truncated factored-metric file")
        q, r = struct.unpack("<QQ", header)
        w = np.frombuffer(fh.read(r * 8), dtype="<f8").astype(np.float64)
        B = np.frombuffer(fh.read(q * r * 8), dtype="<f8").reshape(q, r).astype(np.float64)
    return symmetrize((B * w) @ B.T)
