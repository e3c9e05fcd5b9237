"""Recovery metrics, cluster scoring, and the covariance-contrast baseline.

Column matrices compared here are recoverable only up to column permutation
and sign, so every comparison starts from :func:`greedy_align`, which matches
estimated columns to true columns in order of the true columns.
"""

from __future__ import annotations

import warnings

import numpy as np

from .tensor import sym_eig

__all__ = [
    "greedy_align",
    "align_columns",
    "mean_cosine_similarity",
    "relative_frobenius_error",
    "silhouette",
    "cpca_components",
]


def greedy_align(true_mat: np.ndarray, est_mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Greedy column matching of an estimate against a reference.

    For each reference column in order, the unmatched estimated column with
    the largest absolute cosine similarity is selected, with its sign flipped
    when the similarity is negative.  Returns ``(permutation, signs)`` such
    that ``est_mat[:, permutation] * signs`` is the aligned estimate.
    """
    true_mat = np.asarray(true_mat, dtype=float)
    est_mat = np.asarray(est_mat, dtype=float)
    if true_mat.shape != est_mat.shape:
        raise ValueError(f"shape mismatch: {true_mat.shape} vs {est_mat.shape}")
    count = true_mat.shape[1]
    similarity = true_mat.T @ est_mat
    perm = np.empty(count, dtype=int)
    signs = np.empty(count)
    unmatched = list(range(count))
    for i in range(count):
        row = similarity[i, unmatched]
        pick = int(np.argmax(np.abs(row)))
        j = unmatched.pop(pick)
        perm[i] = j
        signs[i] = 1.0 if row[pick] >= 0 else -1.0
    return perm, signs


def align_columns(est_mat: np.ndarray, perm: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Apply a permutation and sign vector from :func:`greedy_align`."""
    return np.asarray(est_mat, dtype=float)[:, perm] * signs


def mean_cosine_similarity(true_mat: np.ndarray, est_aligned: np.ndarray) -> float:
    """Mean over columns of the inner products of matched unit columns."""
    true_mat = np.asarray(true_mat, dtype=float)
    est_aligned = np.asarray(est_aligned, dtype=float)
    if true_mat.shape != est_aligned.shape:
        raise ValueError(f"shape mismatch: {true_mat.shape} vs {est_aligned.shape}")
    return float(np.mean(np.sum(true_mat * est_aligned, axis=0)))


def relative_frobenius_error(true_mat: np.ndarray, est_aligned: np.ndarray) -> float:
    """``sqrt(sum (b_ij - b'_ij)^2 / c)`` over ``c`` matched columns."""
    true_mat = np.asarray(true_mat, dtype=float)
    est_aligned = np.asarray(est_aligned, dtype=float)
    if true_mat.shape != est_aligned.shape:
        raise ValueError(f"shape mismatch: {true_mat.shape} vs {est_aligned.shape}")
    diff = true_mat - est_aligned
    return float(np.sqrt(np.sum(diff * diff) / true_mat.shape[1]))


def silhouette(points: np.ndarray, labels) -> float:
    """Mean silhouette score of labelled 2-D points under Euclidean distance.

    Per point, ``a`` is the mean distance to the rest of its own cluster and
    ``b`` the smallest mean distance to any other cluster; the point scores
    ``(b - a) / max(a, b)``, or 0 when it is alone in its cluster or when
    ``a = b = 0``.  Requires at least two clusters.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"expected an (n, d) point array, got shape {pts.shape}")
    labels = np.asarray(labels)
    if labels.shape[0] != pts.shape[0]:
        raise ValueError("one label per point required")
    uniq, inverse = np.unique(labels, return_inverse=True)
    if uniq.size < 2:
        raise ValueError("silhouette undefined for a single cluster")
    n = pts.shape[0]
    counts = np.bincount(inverse, minlength=uniq.size)
    # Distance-sum to every cluster, accumulated in row blocks to bound memory.
    cluster_sums = np.zeros((n, uniq.size))
    block = 512
    for start in range(0, n, block):
        chunk = pts[start:start + block]
        diff = chunk[:, None, :] - pts[None, :, :]
        dists = np.sqrt(np.sum(diff * diff, axis=2))
        for c in range(uniq.size):
            cluster_sums[start:start + block, c] = dists[:, inverse == c].sum(axis=1)

    scores = np.zeros(n)
    for i in range(n):
        own = inverse[i]
        if counts[own] > 1:
            a = cluster_sums[i, own] / (counts[own] - 1)
            b = np.inf
            for c in range(uniq.size):
                if c != own:
                    b = min(b, cluster_sums[i, c] / counts[c])
            denom = max(a, b)
            scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(np.mean(scores))


def cpca_components(cov_fg: np.ndarray, cov_bg: np.ndarray, alpha: float, count: int) -> np.ndarray:
    """Leading contrast directions of ``cov_fg - alpha * cov_bg``.

    Components are the eigenvectors of the difference matrix ordered by
    algebraically descending eigenvalue (contrastive variance maximization,
    so large negative eigenvalues are uninteresting), as unit columns.
    """
    cov_fg = np.asarray(cov_fg, dtype=float)
    cov_bg = np.asarray(cov_bg, dtype=float)
    if cov_fg.shape != cov_bg.shape or cov_fg.ndim != 2:
        raise ValueError("covariance matrices must share a square shape")
    p = cov_fg.shape[0]
    if count > p:
        raise ValueError(f"cannot extract {count} components in dimension {p}")
    spectral = sym_eig(cov_fg - alpha * cov_bg)
    order = np.argsort(-spectral.values, kind="stable")
    return spectral.vectors[:, order[:count]]
