"""Sample cumulants of data matrices and exact cumulant-tensor builders.

Data matrices are ``(n, p)`` arrays with rows as observations.  Covariance
and fourth-moment estimators divide by ``n`` (not ``n - 1``); at the sample
sizes this package targets the bias is irrelevant and the plain ``1/n``
normalization keeps the second- and fourth-order estimators consistent with
each other.
"""

from __future__ import annotations

import warnings

import numpy as np

from .tensor import rank_one, symmetrize

__all__ = [
    "sample_mean",
    "sample_covariance",
    "fourth_cumulant",
    "build_exact_tensor",
]

#: Sample-block size for the fourth-moment accumulation.  Fixed so the
#: block-sequential reduction order, and hence the result, is deterministic.
_BLOCK = 16384


def _as_data_matrix(data, min_rows: int = 2) -> np.ndarray:
    d = np.asarray(data, dtype=float)
    if d.ndim != 2:
        raise ValueError(f"expected an (n, p) data matrix, got shape {d.shape}")
    if d.shape[0] < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {d.shape[0]}")
    if not np.all(np.isfinite(d)):
        raise ValueError("data matrix contains non-finite entries")
    return d


def sample_mean(data) -> np.ndarray:
    """Column means of a data matrix."""
    return _as_data_matrix(data).mean(axis=0)


def sample_covariance(data) -> np.ndarray:
    """Sample covariance with divisor ``n``.

    Entry ``(i, j)`` is ``(1/n) sum_t (X_ti - mean_i)(X_tj - mean_j)``.
    """
    d = _as_data_matrix(data)
    n = d.shape[0]
    centered = d - d.mean(axis=0)
    cov = centered.T @ centered / n
    return 0.5 * (cov + cov.T)


def fourth_cumulant(data) -> np.ndarray:
    """Fourth-order sample cumulant tensor of a data matrix.

    Entry ``(i,j,k,l)`` is the central fourth moment ``M_ijkl`` minus the
    three pairings of sample covariances,
    ``sigma_ij sigma_kl + sigma_ik sigma_jl + sigma_il sigma_jk``.
    Means are taken in a first pass and centered moments in a second; the
    sample loop accumulates in fixed-size blocks so the result is
    bit-deterministic.
    """
    d = _as_data_matrix(data)
    n, p = d.shape
    if n < 5:
        warnings.warn(
            f"fourth cumulant from only {n} samples is a very unstable estimate",
            RuntimeWarning,
            stacklevel=2,
        )
    centered = d - d.mean(axis=0)
    cov = centered.T @ centered / n
    cov = 0.5 * (cov + cov.T)

    moment = np.zeros((p * p, p * p))
    for start in range(0, n, _BLOCK):
        block = centered[start:start + _BLOCK]
        pairs = (block[:, :, None] * block[:, None, :]).reshape(block.shape[0], p * p)
        moment += pairs.T @ pairs
    moment /= n

    t = moment.reshape(p, p, p, p)
    t = t - np.einsum("ij,kl->ijkl", cov, cov)
    t = t - np.einsum("ik,jl->ijkl", cov, cov)
    t = t - np.einsum("il,jk->ijkl", cov, cov)
    return symmetrize(t)


def build_exact_tensor(terms, dim: int | None = None) -> np.ndarray:
    """Dense ``sum_i c_i v_i^{(x)4}`` from ``(coefficient, vector)`` pairs.

    The exact-model counterpart of :func:`fourth_cumulant`: the fourth
    cumulant of a linear mixture of independent sources is exactly this sum
    with one term per source.  Used throughout the tests as the oracle
    against which sampled estimates and decompositions are checked.
    """
    pairs = [(float(c), np.asarray(v, dtype=float).ravel()) for c, v in terms]
    if not pairs:
        if dim is None:
            raise ValueError("no terms given and no dimension to build a zero tensor")
        return np.zeros((dim,) * 4)
    p = pairs[0][1].size
    if dim is not None and dim != p:
        raise ValueError(f"term vectors have length {p}, expected {dim}")
    for _, v in pairs:
        if v.size != p:
            raise ValueError("term vectors have inconsistent lengths")
    out = np.zeros((p,) * 4)
    for c, v in pairs:
        out += c * rank_one(v)
    return out
