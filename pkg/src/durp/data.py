"""Labeled dataset container, LIBSVM text ingestion, PCA, and spectrum diagnostics.

Points are stored column-wise: ``points[:, i]`` is the i-th example.  Labels are
contiguous 0-based integer class ids; :func:`parse_libsvm` remaps whatever label
values appear in the input and returns the mapping it used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ParseError(ValueError):
    """Raised when a LIBSVM text stream violates the expected format."""


@dataclass(frozen=True)
class LabeledDataset:
    """A d x n matrix of points (one column per example) plus integer labels.

    Parameters
    ----------
    points : ndarray of shape (d, n)
        Feature matrix, float64, all entries finite.
    labels : ndarray of shape (n,)
        Nonnegative integer class ids.
    """

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        if points.ndim != 2:
            raise ValueError("points must be a 2-d array (d rows, n columns)")
        if labels.ndim != 1 or labels.shape[0] != points.shape[1]:
            raise ValueError(
                "labels must be 1-d with one entry per point column "
                f"(got {labels.shape} labels for {points.shape[1]} points)"
            )
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be nonnegative integers")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def d(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


@dataclass(frozen=True)
class PcaBasis:
    """Orthonormal principal directions of a dataset.

    Fields
    ------
    basis : ndarray of shape (d, k)
        Orthonormal columns, each with its largest-magnitude entry positive.
    mean : ndarray of shape (d,)
        Per-feature mean removed before the eigendecomposition.
    eigenvalues : ndarray of shape (k,)
        Covariance eigenvalues, nonincreasing, clamped at zero.
    """

    basis: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray


def parse_libsvm(text, d=None):
    """Parse LIBSVM-format text into a dataset.

    Each nonempty line is ``<label> <index>:<value> ...`` with 1-based,
    strictly increasing indices.  Labels are remapped (sorted ascending) to
    contiguous 0-based ids.

    Parameters
    ----------
    text : str
        The file contents.
    d : int, optional
        Feature-dimension override.  Defaults to the largest index seen;
        must be at least that large when given.

    Returns
    -------
    (LabeledDataset, dict)
        The dataset and the mapping from original label value to class id.
    """
    raw_labels = []
    rows = []  # per line: list of (0-based index, value)
    max_index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        tokens = stripped.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise ParseError(f"line {lineno}: bad label {tokens[0]!r}") from None
        if not np.isfinite(label):
            raise ParseError(f"line {lineno}: label must be finite")
        entries = []
        prev_index = 0
        for token in tokens[1:]:
            head, sep, tail = token.partition(":")
            if not sep:
                raise ParseError(f"line {lineno}: expected index:value, got {token!r}")
            try:
                index = int(head)
                value = float(tail)
            except ValueError:
                raise ParseError(f"line {lineno}: bad feature entry {token!r}") from None
            if index < 1:
                raise ParseError(f"line {lineno}: indices are 1-based, got {index}")
            if index <= prev_index:
                raise ParseError(
                    f"line {lineno}: indices must be strictly increasing "
                    f"({index} after {prev_index})"
                )
            if not np.isfinite(value):
                raise ParseError(f"line {lineno}: non-finite value in {token!r}")
            prev_index = index
            entries.append((index - 1, value))
        max_index = max(max_index, prev_index)
        raw_labels.append(label)
        rows.append(entries)
    if not rows:
        raise ParseError("no data lines found")
    if d is None:
        d = max_index
    elif d < max_index:
        raise ParseError(f"d override {d} is smaller than largest index {max_index}")
    points = np.zeros((d, len(rows)))
    for col, entries in enumerate(rows):
        for idx, value in entries:
            points[idx, col] = value
    uniques = sorted(set(raw_labels))
    label_map = {value: i for i, value in enumerate(uniques)}
    labels = np.array([label_map[v] for v in raw_labels], dtype=np.int64)
    return LabeledDataset(points, labels), label_map


def serialize_libsvm(data):
    """Render a dataset as LIBSVM text (zero entries omitted, 1-based indices)."""
    lines = []
    for col in range(data.n):
        x = data.points[:, col]
        nz = np.nonzero(x)[0]
        parts = [str(int(data.labels[col]))]
        parts.extend("%d:%.17g" % (i + 1, x[i]) for i in nz)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_libsvm(path, d=None):
    """Read a LIBSVM file from disk; see :func:`parse_libsvm`."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_libsvm(fh.read(), d=d)


def _orient_columns(basis):
    # sign convention: largest-magnitude entry of every column is positive
    flips = basis[np.argmax(np.abs(basis), axis=0), np.arange(basis.shape[1])] < 0
    basis = basis.copy()
    basis[:, flips] *= -1.0
    return basis


def _complete_basis(partial, d, k):
    """Extend ``partial`` (d x j, orthonormal) to d x k with canonical directions."""
    columns = [partial[:, i] for i in range(partial.shape[1])]
    for axis in range(d):
        if len(columns) == k:
            break
        e = np.zeros(d)
        e[axis] = 1.0
        for c in columns:
            e -= (c @ e) * c
        norm = np.linalg.norm(e)
        if norm > 1e-8:
            columns.append(e / norm)
    if len(columns) < k:
        raise ValueError("could not complete an orthonormal basis")
    return np.column_stack(columns)


def pca_fit(data, k):
    """Top-k principal directions of the (centered) point cloud.

    Uses the n x n Gram system instead of the d x d covariance whenever
    d > n.  Rank-deficient requests are padded with an orthonormal
    completion carrying eigenvalue 0.
    """
    if not 1 <= k <= min(data.d, data.n):
        raise ValueError(f"k must be in [1, min(d, n)] = [1, {min(data.d, data.n)}]")
    mean = data.points.mean(axis=1)
    centered = data.points - mean[:, None]
    n = data.n
    if data.d <= n:
        cov = (centered @ centered.T) / n
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1][:k]
        values = eigvals[order]
        vectors = eigvecs[:, order]
        cutoff = max(values[0], 0.0) * 1e-12
        keep = values > cutoff
        values = np.where(keep, values, 0.0)
        if not np.all(keep):
            vectors = _complete_basis(vectors[:, keep], data.d, k)
    else:
        gram = (centered.T @ centered) / n
        eigvals, eigvecs = np.linalg.eigh(gram)
        order = np.argsort(eigvals)[::-1]
        eigvals = eigvals[order]
        eigvecs = eigvecs[:, order]
        cutoff = max(eigvals[0], 0.0) * 1e-12
        keep = eigvals > cutoff
        kept = min(int(keep.sum()), k)
        # covariance eigenvector recovered as centered @ w / sqrt(n * eigval)
        vectors = centered @ eigvecs[:, :kept]
        vectors /= np.sqrt(n * eigvals[:kept])
        values = np.concatenate([eigvals[:kept], np.zeros(k - kept)])
        if kept < k:
            vectors = _complete_basis(vectors, data.d, k)
    vectors = _orient_columns(vectors)
    return PcaBasis(basis=vectors, mean=mean, eigenvalues=np.maximum(values, 0.0))


def eigen_spectrum(data):
    """Normalized covariance spectrum of the centered point cloud.

    Returns
    -------
    (ndarray, bool)
        Nonincreasing eigenvalue vector summing to 1, and True when the
        normalization was applied.  All-zero (degenerate) data yields an
        all-zero vector and False.
    """
    centered = data.points - data.points.mean(axis=1, keepdims=True)
    singular = np.linalg.svd(centered, compute_uv=False)
    spectrum = singular**2
    total = spectrum.sum()
    if total <= 0.0:
        return np.zeros_like(spectrum), False
    return spectrum / total, True


def spectrum_csv(spectrum):
    """Render a spectrum as ``rank,normalized_eigenvalue`` CSV text."""
    lines = ["rank,normalized_eigenvalue"]
    lines.extend("%d,%.17g" % (i + 1, v) for i, v in enumerate(spectrum))
    return "\n".join(lines) + "\n"
