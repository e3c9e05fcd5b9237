"""General symmetric tensor decomposition and closed-form coefficient fits.

Unlike the hierarchical route, the decomposition here handles rank-one terms
whose vectors are not orthogonal.  Each component is found by power iteration
on the map ``x -> reshape(P vec(x x^T)) x``, where ``P`` projects onto the
span of the leading eigenvectors of the flattening: the squares ``v^{(x)2}``
of the true component vectors are exactly the fixed points of ``P`` on exact
input.  After each extraction the component's coefficient is fitted in closed
form and the rank-one term is deflated from the tensor before the spectrum is
recomputed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb
from typing import NamedTuple

import numpy as np

from .tensor import Decomposition, SpectralPair, flatten, rank_one, sym_eig

__all__ = [
    "DecompConfig",
    "identifiability_bound",
    "check_identifiable",
    "decompose_general",
    "fit_coefficient",
    "deflate_background",
    "GammaEstimate",
    "estimate_gamma",
]

#: Subspace-membership score above which a power-iteration candidate counts
#: as an exact component of the tensor.
_MEMBERSHIP_TOL = 1e-6

#: Magnitude below which the inverse-weighted quadratic form of a pattern is
#: considered unrepresented in the tensor.
_REPRESENTED_TOL = 1e-12


@dataclass(frozen=True)
class DecompConfig:
    """Knobs for the randomized decomposition.

    The decomposition is deterministic given ``seed``: restart ``j`` of
    extraction ``k`` draws from a generator keyed by ``(seed, k, j)`` and the
    candidate-selection rule does not depend on evaluation order.
    """

    restarts: int = 30
    max_iters: int = 500
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def identifiability_bound(dim: int) -> int:
    """Largest rank at which generic recovery is guaranteed for dimension ``dim``.

    ``binom(dim + 1, 2)`` in general; 9 when ``dim = 4``, where rank 8 is
    additionally excluded (see :func:`check_identifiable`).
    """
    if dim == 4:
        return 9
    return comb(dim + 1, 2)


def check_identifiable(dim: int, rank: int) -> None:
    """Raise ``ValueError`` if ``rank`` exceeds the recovery guarantee."""
    bound = identifiability_bound(dim)
    if rank > bound:
        raise ValueError(
            f"rank {rank} exceeds the identifiability bound {bound} for dimension {dim}"
        )
    if dim == 4 and rank == 8:
        raise ValueError(
            "rank 8 in dimension 4 is the known exceptional case and is not identifiable"
        )


def _power_iterate(vectors: np.ndarray, x0: np.ndarray, max_iters: int, tol: float) -> np.ndarray:
    """Iterate ``x -> normalize(reshape(V V^T vec(x x^T)) x)`` from ``x0``."""
    p = x0.size
    x = x0
    for _ in range(max_iters):
        coeffs = vectors.T @ np.outer(x, x).ravel()
        m = (vectors @ coeffs).reshape(p, p)
        y = m @ x
        norm = np.linalg.norm(y)
        if norm < 1e-300:
            return x
        y = y / norm
        if min(np.linalg.norm(y - x), np.linalg.norm(y + x)) < tol:
            return y
        x = y
    return x


def _membership(vectors: np.ndarray, x: np.ndarray) -> float:
    """Norm of the projection of ``vec(x x^T)`` onto the subspace, in [0, 1]."""
    return float(np.linalg.norm(vectors.T @ np.outer(x, x).ravel()))


def decompose_general(t: np.ndarray, rank: int, config: DecompConfig | None = None) -> Decomposition:
    """Decompose a symmetric tensor into ``rank`` non-orthogonal rank-one terms.

    Exact rank-``rank`` tensors with generic components and linearly
    independent squares are recovered up to sign and permutation.  On noisy
    input the best-scoring candidate of each extraction is kept and a warning
    carries the residual membership score.
    """
    cfg = config if config is not None else DecompConfig()
    t = np.asarray(t, dtype=float)
    p = t.shape[0]
    check_identifiable(p, rank)
    residual = t.copy()
    terms: list[tuple[float, np.ndarray]] = []
    diagnostics: list[str] = []
    for k in range(rank):
        spectral = sym_eig(flatten(residual)).truncate(rank=rank - k)
        if len(spectral) == 0:
            warnings.warn(
                f"tensor exhausted after {k} of {rank} components",
                RuntimeWarning,
                stacklevel=2,
            )
            diagnostics.append(f"stopped at {k} components: residual numerically zero")
            break
        best: tuple[float, float, np.ndarray, float] | None = None
        for j in range(cfg.restarts):
            rng = np.random.default_rng([cfg.seed, k, j])
            x0 = rng.standard_normal(p)
            x0 /= np.linalg.norm(x0)
            x = _power_iterate(spectral.vectors, x0, cfg.max_iters, cfg.tol)
            score = _membership(spectral.vectors, x)
            try:
                coef = fit_coefficient(spectral, x)
            except ValueError:
                continue
            if best is None or (score, abs(coef)) > (best[0], best[1]):
                best = (score, abs(coef), x, coef)
        if best is None:
            raise ValueError(
                f"extraction {k}: no restart produced a representable candidate"
            )
        score, _, vector, coef = best
        if score < 1.0 - _MEMBERSHIP_TOL:
            diagnostics.append(f"component {k}: membership {score:.8f}")
        terms.append((coef, vector))
        residual = residual - coef * rank_one(vector)
    if any(d.startswith("component") for d in diagnostics):
        warnings.warn(
            "some components converged below the subspace membership target "
            "(normal for sampled tensors); best candidates kept, scores in diagnostics",
            RuntimeWarning,
            stacklevel=2,
        )
    return Decomposition.from_terms(terms, diagnostics)


def fit_coefficient(spectral: SpectralPair, vector: np.ndarray) -> float:
    """Closed-form coefficient of ``vector^{(x)4}`` in the decomposed tensor.

    Given the thin eigendecomposition ``V D V^T`` of the flattening, returns
    ``(vec(a a^T)^T V D^{-1} V^T vec(a a^T))^{-1}``, the unique coefficient
    whose removal drops the flattening rank by one.
    """
    a = np.asarray(vector, dtype=float).ravel()
    squared = np.outer(a, a).ravel()
    proj = spectral.vectors.T @ squared
    form = float(np.sum(proj * proj / spectral.values)) if len(spectral) else 0.0
    if abs(form) < _REPRESENTED_TOL:
        raise ValueError("pattern not represented in tensor")
    return 1.0 / form


def deflate_background(t: np.ndarray, patterns: np.ndarray,
                       rank: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Fit the coefficient of each pattern's fourth power and subtract them.

    All coefficients are fitted against the same thin spectrum of the input's
    flattening; ``rank`` truncates that spectrum to the model rank, which for
    sampled tensors should be the total number of rank-one terms expected in
    the tensor.  Returns ``(coefficients, residual tensor)``.
    """
    t = np.asarray(t, dtype=float)
    patterns = np.asarray(patterns, dtype=float)
    if patterns.ndim == 1:
        patterns = patterns[:, None]
    if patterns.size and patterns.shape[0] != t.shape[0]:
        raise ValueError(
            f"patterns have dimension {patterns.shape[0]}, tensor has {t.shape[0]}"
        )
    count = patterns.shape[1] if patterns.size else 0
    if count == 0:
        return np.empty(0), t.copy()
    spectral = sym_eig(flatten(t)).truncate(rank=rank)
    coefs = np.empty(count)
    for i in range(count):
        try:
            coefs[i] = fit_coefficient(spectral, patterns[:, i])
        except ValueError as exc:
            raise ValueError(f"background pattern {i}: {exc}") from exc
    residual = t.copy()
    for i in range(count):
        residual -= coefs[i] * rank_one(patterns[:, i])
    return coefs, residual


class GammaEstimate(NamedTuple):
    """Proportionality constant with its per-pattern evidence.

    ``per_index[i]`` is the fourth root of the fitted-to-background
    coefficient ratio for background pattern ``i`` (NaN where excluded);
    ``gamma`` is their median and ``spread`` the largest relative deviation
    from it, a diagnostic for how plausible the proportional model is.
    """

    gamma: float
    per_index: np.ndarray
    spread: float


def estimate_gamma(t_fg: np.ndarray, background: Decomposition,
                   rank: int | None = None) -> GammaEstimate:
    """Estimate the background-to-foreground proportionality constant.

    For each background term ``(lambda_i, a_i)`` the coefficient
    ``lambda_i'`` of ``a_i^{(x)4}`` in the foreground tensor is fitted in
    closed form and ``(lambda_i'/lambda_i)^{1/4}`` recorded.  Nonpositive
    ratios are excluded with a warning; if every index is excluded the model
    is not proportional and a ``ValueError`` is raised.  ``rank`` truncates
    the foreground spectrum to the expected total model rank.
    """
    if len(background) == 0:
        raise ValueError("no background terms to estimate the proportionality from")
    spectral = sym_eig(flatten(np.asarray(t_fg, dtype=float))).truncate(rank=rank)
    per_index = np.full(len(background), np.nan)
    for i, (lam, a) in enumerate(background):
        try:
            lam_prime = fit_coefficient(spectral, a)
        except ValueError as exc:
            warnings.warn(
                f"background pattern {i} excluded from the estimate: {exc}",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        ratio = lam_prime / lam
        if ratio <= 0.0:
            warnings.warn(
                f"background pattern {i} excluded: coefficient ratio {ratio:.3e} <= 0",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        per_index[i] = ratio ** 0.25
    valid = per_index[np.isfinite(per_index)]
    if valid.size == 0:
        raise ValueError("model not proportional: every coefficient ratio was unusable")
    gamma = float(np.median(valid))
    spread = float(np.max(np.abs(valid - gamma)) / gamma)
    return GammaEstimate(gamma, per_index, spread)
