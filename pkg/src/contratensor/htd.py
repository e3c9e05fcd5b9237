"""Hierarchical rank-one decomposition of symmetric order-4 tensors.

The decomposition runs two levels of eigendecompositions: first of the
p^2 x p^2 flattening, then of each leading eigenvector reshaped to a p x p
matrix.  Component ``i`` is ``(mu_i * beta_i^2) b_i^{(x)4}`` where ``mu_i``
is the ``i``-th flattening eigenvalue and ``(beta_i, b_i)`` the top eigenpair
of the ``i``-th reshaped eigenvector.  The procedure is deterministic and
exact on orthogonally decomposable tensors with distinct coefficients.
"""

from __future__ import annotations

import warnings

import numpy as np

from .tensor import Decomposition, RANK_TOL, flatten, reshape_vec, sym_eig

__all__ = ["htd", "htd_error_bound"]

#: Relative closeness at which the two largest reshaped-matrix eigenvalue
#: magnitudes count as tied.  Ties make the extracted vector unstable.
_TIE_TOL = 1e-12


def htd(t: np.ndarray, rank: int) -> Decomposition:
    """Rank-``rank`` hierarchical decomposition of a symmetric tensor.

    Requests above the numerical rank of the flattening are truncated with a
    warning.  All retained terms are returned even when their weights are
    tiny; filtering is the caller's concern.
    """
    t = np.asarray(t, dtype=float)
    p = t.shape[0]
    if rank < 1 or rank > p * p:
        raise ValueError(f"rank must be in [1, {p * p}] for dimension {p}, got {rank}")
    spectral = sym_eig(flatten(t))
    q = spectral.numerical_rank()
    diagnostics: list[str] = []
    if rank > q:
        warnings.warn(
            f"requested rank {rank} exceeds numerical rank {q}; truncating",
            RuntimeWarning,
            stacklevel=2,
        )
        diagnostics.append(f"rank truncated from {rank} to numerical rank {q}")
        rank = q
    terms = []
    for i in range(rank):
        mu = spectral.values[i]
        inner = sym_eig(reshape_vec(spectral.vectors[:, i], p))
        beta = inner.values[0]
        if len(inner) > 1 and abs(abs(inner.values[0]) - abs(inner.values[1])) <= _TIE_TOL * abs(inner.values[0]):
            diagnostics.append(f"component {i}: magnitude-tied top eigenvalue, vector unstable")
        terms.append((mu * beta * beta, inner.vectors[:, 0]))
    return Decomposition.from_terms(terms, diagnostics)


def htd_error_bound(t: np.ndarray, rank: int) -> float:
    """A-priori Frobenius bound on the rank-``rank`` approximation error.

    Evaluates, from the computed spectra,

        sqrt(sum_{i>rank} mu_i^2)
        + sum_{i<=rank} |mu_i| (1 + |beta_i|) sqrt(sum_{j>=2} beta_i^{(j)2})

    where the first sum runs over the discarded flattening eigenvalues and
    the inner sums over the non-leading eigenvalues of each reshaped leading
    eigenvector.  Sampled tensors are numerically full rank, so the bound is
    taken over the full computed spectra rather than any exact-rank cutoff.
    """
    t = np.asarray(t, dtype=float)
    p = t.shape[0]
    if rank < 1 or rank > p * p:
        raise ValueError(f"rank must be in [1, {p * p}] for dimension {p}, got {rank}")
    spectral = sym_eig(flatten(t))
    tail = spectral.values[rank:]
    bound = float(np.sqrt(np.sum(tail * tail)))
    for i in range(min(rank, len(spectral))):
        mu = spectral.values[i]
        if mu == 0.0:
            continue
        inner = sym_eig(reshape_vec(spectral.vectors[:, i], p))
        beta = inner.values[0]
        rest = inner.values[1:]
        bound += abs(mu) * (1.0 + abs(beta)) * float(np.sqrt(np.sum(rest * rest)))
    return bound
