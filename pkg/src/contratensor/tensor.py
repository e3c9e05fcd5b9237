"""Dense symmetric order-4 tensor kernel.

A symmetric order-4 tensor over R^p is stored as a plain ``numpy`` array of
shape ``(p, p, p, p)`` whose entries are invariant under all 24 permutations
of the four indices.  This module provides the construction guard
(:func:`symmetrize`), the flattening/reshaping maps between tensors, p^2 x p^2
matrices and p x p matrices, rank-one contractions, and the deterministic
symmetric eigendecomposition that every decomposition routine in the package
is built on.

All functions are pure; arrays are never mutated in place.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator, NamedTuple

import numpy as np

__all__ = [
    "symmetrize",
    "flatten",
    "reshape_vec",
    "rank_one",
    "subtract_rank_ones",
    "quad_form",
    "contract3",
    "canonical_sign",
    "sym_eig",
    "SpectralPair",
    "Rank1Term",
    "Decomposition",
    "save_symtensor4",
    "load_symtensor4",
]

#: Relative cutoff below which eigenvalues count as numerically zero.
RANK_TOL = 1e-10


def symmetrize(raw) -> np.ndarray:
    """Average ``raw`` over the 24 index permutations.

    Idempotent on input that is already symmetric.  Raises ``ValueError``
    naming the offending index if any entry is not finite.
    """
    t = np.asarray(raw, dtype=float)
    if t.ndim != 4 or len(set(t.shape)) != 1:
        raise ValueError(f"expected a p x p x p x p array, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        idx = tuple(int(i) for i in np.argwhere(~np.isfinite(t))[0])
        raise ValueError(f"non-finite entry at index {idx}")
    out = np.zeros_like(t)
    for perm in permutations(range(4)):
        out += t.transpose(perm)
    out /= 24.0
    return out


def flatten(t: np.ndarray) -> np.ndarray:
    """Rearrange a ``(p,p,p,p)`` tensor into its ``p^2 x p^2`` flattening.

    Row index ``i1*p + i2``, column index ``j1*p + j2``.  The result is
    symmetric whenever the tensor is.
    """
    t = np.asarray(t, dtype=float)
    p = t.shape[0]
    return t.reshape(p * p, p * p)


def reshape_vec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Reshape a length ``p^2`` vector to the ``p x p`` matrix it vectorizes.

    Entry ``(i, j)`` is ``v[i*p + j]``; inverse of the vectorization used by
    :func:`flatten`.
    """
    v = np.asarray(v, dtype=float).ravel()
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a p^2 vectorization")
    return v.reshape(dim, dim)


def rank_one(v: np.ndarray) -> np.ndarray:
    """Fourth tensor power ``v (x) v (x) v (x) v`` of a vector."""
    v = np.asarray(v, dtype=float).ravel()
    vv = np.outer(v, v)
    return np.einsum("ij,kl->ijkl", vv, vv)


def subtract_rank_ones(t: np.ndarray, terms) -> np.ndarray:
    """Subtract ``sum_i w_i v_i^{(x)4}`` from a symmetric tensor.

    ``terms`` is any iterable of ``(weight, vector)`` pairs, e.g. a
    :class:`Decomposition`.
    """
    t = np.asarray(t, dtype=float)
    p = t.shape[0]
    out = t.copy()
    for weight, vector in terms:
        vector = np.asarray(vector, dtype=float).ravel()
        if vector.size != p:
            raise ValueError(f"term vector has length {vector.size}, expected {p}")
        out -= weight * rank_one(vector)
    return out


def quad_form(t: np.ndarray, x: np.ndarray) -> float:
    """Full contraction ``sum T[i,j,k,l] x_i x_j x_k x_l``."""
    return float(contract3(t, x) @ np.asarray(x, dtype=float).ravel())


def contract3(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Contract the last three indices: ``out_i = sum T[i,j,k,l] x_j x_k x_l``."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float).ravel()
    if x.size != t.shape[0]:
        raise ValueError(f"vector of length {x.size} does not match dimension {t.shape[0]}")
    return np.einsum("ijkl,j,k,l->i", t, x, x, x)


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its largest-magnitude entry is positive.

    Ties are resolved toward the lowest index.  Even-order rank-one terms are
    sign-ambiguous, so every reported vector is normalized this way.
    """
    v = np.asarray(v, dtype=float)
    idx = int(np.argmax(np.abs(v)))
    if v[idx] < 0:
        return -v
    return v.copy()


@dataclass(frozen=True)
class SpectralPair:
    """Eigendecomposition with eigenvalues sorted by descending magnitude.

    ``values`` has shape ``(q,)`` and ``vectors`` shape ``(m, q)`` with
    orthonormal columns, each carrying the canonical sign.
    """

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self) -> int:
        return self.values.size

    def numerical_rank(self, rel_tol: float = RANK_TOL) -> int:
        """Number of eigenvalues above ``rel_tol`` times the largest magnitude."""
        if self.values.size == 0:
            return 0
        top = np.abs(self.values[0])
        if top == 0.0:
            return 0
        return int(np.count_nonzero(np.abs(self.values) > rel_tol * top))

    def truncate(self, rank: int | None = None, rel_tol: float = RANK_TOL) -> "SpectralPair":
        """Thin decomposition keeping the leading eigenpairs.

        Keeps ``min(rank, numerical rank)`` pairs; with ``rank=None`` keeps
        the numerical rank.  The numerical-rank floor prevents near-zero
        eigenvalues from entering inverse weighting downstream.
        """
        q = self.numerical_rank(rel_tol)
        if rank is not None:
            if rank < 0:
                raise ValueError("rank must be nonnegative")
            q = min(q, rank)
        return SpectralPair(self.values[:q].copy(), self.vectors[:, :q].copy())

    def reconstruct(self) -> np.ndarray:
        """``sum_i mu_i v_i v_i^T`` over the retained pairs."""
        return (self.vectors * self.values) @ self.vectors.T


def sym_eig(m: np.ndarray) -> SpectralPair:
    """Full spectrum of a symmetric matrix, sorted by descending magnitude.

    The input must be square and symmetric to within ``1e-8`` relative
    tolerance; it is symmetrized exactly before factorization.  Degenerate
    magnitude ties keep the order the underlying factorization produced
    (lowest original index first), which is deterministic but unstable under
    perturbation of the input.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > 1e-8 * scale:
        raise ValueError(f"matrix is not symmetric: max |M - M^T| = {asym:.3e}")
    sym = 0.5 * (m + m.T)
    try:
        values, vectors = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh essentially always converges
        raise ValueError(f"eigendecomposition failed to converge: {exc}") from exc
    order = np.argsort(-np.abs(values), kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for k in range(vectors.shape[1]):
        vectors[:, k] = canonical_sign(vectors[:, k])
    return SpectralPair(values, vectors)


class Rank1Term(NamedTuple):
    """One weighted rank-one summand ``weight * vector^{(x)4}``."""

    weight: float
    vector: np.ndarray


@dataclass(frozen=True)
class Decomposition:
    """Sum of rank-one fourth powers, sorted by descending weight magnitude.

    ``weights`` has shape ``(k,)`` and ``vectors`` shape ``(p, k)`` with unit
    columns carrying the canonical sign.  ``diagnostics`` records anomalies
    met while computing the decomposition (rank truncation, eigenvalue ties,
    non-converged candidates).
    """

    weights: np.ndarray
    vectors: np.ndarray
    diagnostics: tuple[str, ...] = field(default=())

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, np.ndarray]],
                   diagnostics: Iterable[str] = ()) -> "Decomposition":
        pairs = [(float(w), canonical_sign(np.asarray(v, dtype=float).ravel()))
                 for w, v in terms]
        pairs = [(w, v) for w, v in pairs if w != 0.0]
        pairs.sort(key=lambda wv: -abs(wv[0]))
        if pairs:
            weights = np.array([w for w, _ in pairs])
            vectors = np.column_stack([v for _, v in pairs])
        else:
            weights = np.empty(0)
            vectors = np.empty((0, 0))
        return cls(weights, vectors, tuple(diagnostics))

    def __len__(self) -> int:
        return self.weights.size

    def __iter__(self) -> Iterator[Rank1Term]:
        for k in range(len(self)):
            yield Rank1Term(float(self.weights[k]), self.vectors[:, k])

    @property
    def terms(self) -> list[Rank1Term]:
        return list(self)

    def to_tensor(self, dim: int | None = None) -> np.ndarray:
        """Dense ``sum_i w_i v_i^{(x)4}``."""
        if len(self) == 0:
            if dim is None:
                raise ValueError("empty decomposition needs an explicit dimension")
            return np.zeros((dim,) * 4)
        p = self.vectors.shape[0]
        out = np.zeros((p,) * 4)
        for weight, vector in self:
            out += weight * rank_one(vector)
        return out


def save_symtensor4(path, t: np.ndarray) -> None:
    """Write a tensor in the ``symtensor4`` text format.

    Header line ``symtensor4 p=<p>`` followed by the p^4 entries in row-major
    ``(i,j,k,l)`` order, 17 significant digits, whitespace separated.
    """
    t = np.asarray(t, dtype=float)
    p = t.shape[0]
    lines = [f"symtensor4 p={p}"]
    flat = t.ravel()
    for start in range(0, flat.size, p):
        lines.append(" ".join("%.17g" % x for x in flat[start:start + p]))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def load_symtensor4(path) -> np.ndarray:
    """Read a ``symtensor4`` text file written by :func:`save_symtensor4`."""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip()
        body = handle.read()
    parts = header.split()
    if len(parts) != 2 or parts[0] != "symtensor4" or not parts[1].startswith("p="):
        raise ValueError(f"bad symtensor4 header: {header!r}")
    p = int(parts[1][2:])
    tokens = body.split()
    values = np.array(tokens, dtype=float) if tokens else np.empty(0)
    if values.size != p ** 4:
        raise ValueError(f"expected {p ** 4} entries for p={p}, found {values.size}")
    return symmetrize(values.reshape((p,) * 4))
