"""End-to-end contrastive pattern pipelines.

Two fitting routes share the same output model.  The general route
decomposes the background cumulant, fits the contribution of each background
pattern to the foreground cumulant in closed form, deflates them, and
decomposes the residual hierarchically.  The proportional route assumes the
shared sources scale by a single constant, estimates that constant from the
coefficient ratios (or accepts it from the caller), and decomposes the
weighted difference of the two cumulants directly.

Also here: combined-data PCA preprocessing, eigenvalue-profile rank
suggestion, and the foreground-to-background variance ratio used to rank
patterns for plotting.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .decomp import (
    DecompConfig,
    check_identifiable,
    decompose_general,
    deflate_background,
    estimate_gamma,
    identifiability_bound,
)
from .htd import htd
from .tensor import Decomposition, canonical_sign, flatten, sym_eig

__all__ = [
    "PcaBasis",
    "pca_fit",
    "pca_transform",
    "back_project",
    "ScreeReport",
    "scree",
    "BackgroundTerm",
    "ForegroundTerm",
    "CicaModel",
    "rank_patterns",
    "fit_general",
    "fit_proportional",
    "project",
]

#: Default upper cap on the number of PCA components.
PCA_MAX_COMPONENTS = 30

#: Fraction of variance the default PCA rank must explain if it can do so
#: with fewer than the cap.
PCA_VARIANCE_TARGET = 0.90


@dataclass(frozen=True)
class PcaBasis:
    """Column-orthonormal projection with the centering it was fitted with."""

    components: np.ndarray  # (p, k), orthonormal columns
    center: np.ndarray  # (p,)
    explained: np.ndarray  # (k,) variance ratios, nonincreasing


def pca_fit(fg_data: np.ndarray, bg_data: np.ndarray, k: int | None = None) -> PcaBasis:
    """Principal directions of the stacked foreground and background rows.

    With ``k=None`` the rank is the smaller of ``PCA_MAX_COMPONENTS`` and the
    number of components explaining at least ``PCA_VARIANCE_TARGET`` of the
    variance.  Requests beyond the numerical rank of the stack are truncated
    with a warning.
    """
    fg = np.asarray(fg_data, dtype=float)
    bg = np.asarray(bg_data, dtype=float)
    if fg.ndim != 2 or bg.ndim != 2 or fg.shape[1] != bg.shape[1]:
        raise ValueError("foreground and background must be (n, p) with a shared p")
    stacked = np.vstack([fg, bg])
    if stacked.shape[0] < 2:
        raise ValueError("need at least two combined rows")
    p = stacked.shape[1]
    if k is not None and k > p:
        raise ValueError(f"cannot keep {k} components in dimension {p}")
    center = stacked.mean(axis=0)
    _, sing, vt = np.linalg.svd(stacked - center, full_matrices=False)
    variances = sing * sing
    total = float(variances.sum())
    ratios = variances / total if total > 0 else np.zeros_like(variances)
    num_rank = int(np.count_nonzero(sing > 1e-10 * sing[0])) if sing.size and sing[0] > 0 else 0
    if k is None:
        cumulative = np.cumsum(ratios)
        at_target = int(np.searchsorted(cumulative, PCA_VARIANCE_TARGET) + 1)
        k = min(PCA_MAX_COMPONENTS, at_target, p)
    if k > num_rank:
        warnings.warn(
            f"requested {k} components but the data has numerical rank {num_rank}; truncating",
            RuntimeWarning,
            stacklevel=2,
        )
        k = num_rank
    components = vt[:k].T.copy()
    for j in range(k):
        components[:, j] = canonical_sign(components[:, j])
    return PcaBasis(components=components, center=center, explained=ratios[:k].copy())


def pca_transform(data: np.ndarray, basis: PcaBasis) -> np.ndarray:
    """Center rows and project them onto the basis: ``(D - center) U``."""
    d = np.asarray(data, dtype=float)
    if d.ndim != 2 or d.shape[1] != basis.center.size:
        raise ValueError(
            f"data has shape {d.shape}, basis expects {basis.center.size} columns"
        )
    return (d - basis.center) @ basis.components


def back_project(patterns: np.ndarray, basis: PcaBasis) -> tuple[np.ndarray, np.ndarray]:
    """Lift reduced-space pattern columns back to the original coordinates.

    Returns ``(U @ patterns with unit columns, the norms divided out)``.
    The norms equal the input column norms because the basis is orthonormal;
    they are reported so callers can audit that nothing was lost.
    """
    b = np.asarray(patterns, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[0] != basis.components.shape[1]:
        raise ValueError(
            f"patterns live in dimension {b.shape[0]}, basis has {basis.components.shape[1]}"
        )
    lifted = basis.components @ b
    norms = np.linalg.norm(lifted, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    return lifted / safe, norms


@dataclass(frozen=True)
class ScreeReport:
    """Eigenvalue magnitudes of a flattened cumulant with a rank suggestion."""

    magnitudes: np.ndarray
    suggested_rank: int


def scree(t: np.ndarray) -> ScreeReport:
    """Descending eigenvalue magnitudes of the flattening plus a rank guess.

    The suggestion is the position of the largest consecutive-magnitude ratio
    within the first half of the spectrum.  It is a convenience heuristic for
    where the decay slows down; callers choosing ranks should inspect the
    profile themselves and may override.
    """
    magnitudes = np.abs(sym_eig(flatten(np.asarray(t, dtype=float))).values)
    m = magnitudes.size
    if m == 0 or magnitudes[0] == 0.0:
        return ScreeReport(magnitudes, 0)
    limit = min(m - 1, max(1, m // 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = magnitudes[:limit] / magnitudes[1:limit + 1]
    ratios = np.where(np.isnan(ratios), -np.inf, ratios)
    return ScreeReport(magnitudes, int(np.argmax(ratios)) + 1)


class BackgroundTerm(NamedTuple):
    """Shared pattern with its background and foreground coefficients."""

    vector: np.ndarray
    lam: float
    lam_prime: float


class ForegroundTerm(NamedTuple):
    """Foreground-only pattern with its coefficient and variance-ratio score."""

    vector: np.ndarray
    nu: float
    k_score: float


@dataclass
class CicaModel:
    """Fitted contrastive model: shared patterns, salient patterns, scores.

    Foreground terms are sorted by descending ``k_score``; ``gamma`` is set
    only by the proportional route.  When the model was fitted in a reduced
    PCA space, ``pca`` carries the basis and all pattern vectors live in that
    reduced space.
    """

    background: list[BackgroundTerm]
    foreground: list[ForegroundTerm]
    rank_bg: int
    rank_fg: int
    seed: int
    gamma: float | None = None
    pca: PcaBasis | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def background_matrix(self) -> np.ndarray:
        if not self.background:
            return np.empty((0, 0))
        return np.column_stack([t.vector for t in self.background])

    @property
    def foreground_matrix(self) -> np.ndarray:
        if not self.foreground:
            return np.empty((0, 0))
        return np.column_stack([t.vector for t in self.foreground])

    def to_dict(self) -> dict:
        doc = {
            "schema": 1,
            "mode": "proportional" if self.gamma is not None else "general",
            "ranks": {"r": self.rank_bg, "l": self.rank_fg},
            "seed": self.seed,
            "gamma": self.gamma,
            "background": [
                {
                    "vector": [float(x) for x in t.vector],
                    "lambda": float(t.lam),
                    "lambda_prime": float(t.lam_prime),
                }
                for t in self.background
            ],
            "foreground": [
                {
                    "vector": [float(x) for x in t.vector],
                    "nu": float(t.nu),
                    "k_score": float(t.k_score),
                }
                for t in self.foreground
            ],
            "pca": None,
            "diagnostics": self.diagnostics,
        }
        if self.pca is not None:
            doc["pca"] = {
                "U": [[float(x) for x in row] for row in self.pca.components],
                "center": [float(x) for x in self.pca.center],
                "explained": [float(x) for x in self.pca.explained],
            }
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "CicaModel":
        if doc.get("schema") != 1:
            raise ValueError(f"unsupported model schema {doc.get('schema')!r}")
        pca = None
        if doc.get("pca") is not None:
            pca = PcaBasis(
                components=np.array(doc["pca"]["U"], dtype=float),
                center=np.array(doc["pca"]["center"], dtype=float),
                explained=np.array(doc["pca"]["explained"], dtype=float),
            )
        return cls(
            background=[
                BackgroundTerm(np.array(t["vector"], dtype=float), t["lambda"], t["lambda_prime"])
                for t in doc["background"]
            ],
            foreground=[
                ForegroundTerm(np.array(t["vector"], dtype=float), t["nu"], t["k_score"])
                for t in doc["foreground"]
            ],
            rank_bg=int(doc["ranks"]["r"]),
            rank_fg=int(doc["ranks"]["l"]),
            seed=int(doc["seed"]),
            gamma=None if doc["gamma"] is None else float(doc["gamma"]),
            pca=pca,
            diagnostics=doc.get("diagnostics", {}),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=1)
            handle.write("\n")

    @classmethod
    def load(cls, path) -> "CicaModel":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))


def rank_patterns(patterns: np.ndarray, cov_fg: np.ndarray, cov_bg: np.ndarray) -> np.ndarray:
    """Foreground-to-background variance ratio of each pattern column.

    Patterns whose background variance falls below ``1e-12`` of the
    background trace score the infinity sentinel with a warning: they could
    be genuine foreground patterns or mere background noise, and the ratio
    cannot tell the two apart.
    """
    b = np.asarray(patterns, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    cov_fg = np.asarray(cov_fg, dtype=float)
    cov_bg = np.asarray(cov_bg, dtype=float)
    floor = 1e-12 * float(np.trace(cov_bg))
    scores = np.empty(b.shape[1])
    for j in range(b.shape[1]):
        vec = b[:, j]
        denom = float(vec @ cov_bg @ vec)
        numer = float(vec @ cov_fg @ vec)
        if denom < floor:
            warnings.warn(
                f"pattern {j}: background variance {denom:.3e} below floor; score is +inf",
                RuntimeWarning,
                stacklevel=2,
            )
            scores[j] = np.inf
        else:
            scores[j] = numer / denom
    return scores


def _scored_foreground(fg: Decomposition, cov_fg, cov_bg) -> list[ForegroundTerm]:
    """Attach variance-ratio scores and sort descending by them.

    Without covariances the scores are NaN and the coefficient-magnitude
    order from the decomposition is kept.
    """
    if len(fg) == 0:
        return []
    if cov_fg is None or cov_bg is None:
        scores = np.full(len(fg), np.nan)
        order = np.arange(len(fg))
    else:
        scores = rank_patterns(fg.vectors, cov_fg, cov_bg)
        order = np.argsort(-scores, kind="stable")
    return [
        ForegroundTerm(fg.vectors[:, int(i)].copy(), float(fg.weights[int(i)]), float(scores[int(i)]))
        for i in order
    ]


def _check_joint_identifiable(dim: int, rank_bg: int, rank_fg: int) -> None:
    total = rank_bg + rank_fg
    bound = identifiability_bound(dim)
    if dim == 4:
        if total > 9 or rank_bg == 8 or rank_fg == 8:
            raise ValueError(
                "not identifiable for dimension 4: need r + l <= 9 with r, l != 8, "
                f"got r={rank_bg}, l={rank_fg}"
            )
    elif total > bound:
        raise ValueError(
            f"r + l = {total} exceeds the identifiability bound {bound} for dimension {dim}"
        )


def fit_general(t_fg: np.ndarray, t_bg: np.ndarray, rank_bg: int, rank_fg: int,
                config: DecompConfig | None = None,
                cov_fg: np.ndarray | None = None, cov_bg: np.ndarray | None = None,
                pca: PcaBasis | None = None) -> CicaModel:
    """Fit the general model from a foreground and a background cumulant.

    Background patterns come from the general decomposition of the
    background tensor; their foreground coefficients are fitted in closed
    form against the foreground spectrum truncated to the joint model rank;
    the deflated residual is decomposed hierarchically into ``rank_fg``
    foreground patterns.  Covariances, when given, fill the pattern scores.
    """
    cfg = config if config is not None else DecompConfig()
    t_fg = np.asarray(t_fg, dtype=float)
    t_bg = np.asarray(t_bg, dtype=float)
    if t_fg.shape != t_bg.shape:
        raise ValueError("foreground and background tensors must share a shape")
    p = t_bg.shape[0]
    _check_joint_identifiable(p, rank_bg, rank_fg)

    try:
        background = decompose_general(t_bg, rank_bg, cfg)
    except ValueError as exc:
        raise ValueError(f"background decomposition: {exc}") from exc
    try:
        coefs, residual = deflate_background(
            t_fg, background.vectors, rank=rank_bg + rank_fg
        )
    except ValueError as exc:
        raise ValueError(f"background deflation: {exc}") from exc
    foreground = (
        htd(residual, rank_fg) if rank_fg > 0 else Decomposition.from_terms([])
    )

    bg_terms = [
        BackgroundTerm(background.vectors[:, i].copy(), float(background.weights[i]), float(coefs[i]))
        for i in range(len(background))
    ]
    diagnostics = {}
    notes = list(background.diagnostics) + list(foreground.diagnostics)
    if notes:
        diagnostics["notes"] = notes
    return CicaModel(
        background=bg_terms,
        foreground=_scored_foreground(foreground, cov_fg, cov_bg),
        rank_bg=rank_bg,
        rank_fg=rank_fg,
        seed=cfg.seed,
        gamma=None,
        pca=pca,
        diagnostics=diagnostics,
    )


def fit_proportional(t_fg: np.ndarray, t_bg: np.ndarray, rank_fg: int,
                     gamma: float | None = None,
                     config: DecompConfig | None = None,
                     rank_bg: int | None = None,
                     cov_fg: np.ndarray | None = None, cov_bg: np.ndarray | None = None,
                     pca: PcaBasis | None = None) -> CicaModel:
    """Fit the proportional model, estimating the constant unless given.

    With ``gamma=None`` the background tensor is decomposed at ``rank_bg``
    (the eigenvalue-profile suggestion when that is ``None`` too) and the
    constant is the median of the per-pattern coefficient-ratio roots.  With
    an explicit ``gamma`` (sweep mode) estimation is skipped and no
    background terms are reported.  Either way the foreground patterns are
    the hierarchical decomposition of ``foreground - gamma^4 * background``.
    """
    cfg = config if config is not None else DecompConfig()
    t_fg = np.asarray(t_fg, dtype=float)
    t_bg = np.asarray(t_bg, dtype=float)
    if t_fg.shape != t_bg.shape:
        raise ValueError("foreground and background tensors must share a shape")
    p = t_bg.shape[0]
    if rank_fg < 0 or rank_fg > p * p:
        raise ValueError(f"rank_fg must be in [0, {p * p}], got {rank_fg}")

    bg_terms: list[BackgroundTerm] = []
    fitted_rank_bg = 0
    diagnostics: dict = {}
    if gamma is None:
        if rank_bg is None:
            rank_bg = scree(t_bg).suggested_rank
        if rank_bg < 1:
            raise ValueError(
                "background rank suggestion is 0; pass rank_bg or an explicit gamma"
            )
        background = decompose_general(t_bg, rank_bg, cfg)
        estimate = estimate_gamma(t_fg, background, rank=rank_bg + rank_fg)
        gamma = estimate.gamma
        fitted_rank_bg = rank_bg
        diagnostics["gamma_spread"] = estimate.spread
        diagnostics["gamma_per_index"] = [float(x) for x in estimate.per_index]
        for i, (lam, vec) in enumerate(background):
            ratio = estimate.per_index[i]
            lam_prime = lam * ratio ** 4 if np.isfinite(ratio) else lam * gamma ** 4
            bg_terms.append(BackgroundTerm(vec.copy(), float(lam), float(lam_prime)))
    else:
        gamma = float(gamma)

    contrast = t_fg - gamma ** 4 * t_bg
    foreground = (
        htd(contrast, rank_fg) if rank_fg > 0 else Decomposition.from_terms([])
    )
    if foreground.diagnostics:
        diagnostics["notes"] = list(foreground.diagnostics)
    return CicaModel(
        background=bg_terms,
        foreground=_scored_foreground(foreground, cov_fg, cov_bg),
        rank_bg=fitted_rank_bg,
        rank_fg=rank_fg,
        seed=cfg.seed,
        gamma=float(gamma),
        pca=pca,
        diagnostics=diagnostics,
    )


def project(data: np.ndarray, model: CicaModel, i: int = 0, j: int = 1) -> np.ndarray:
    """Coordinates of each row on two ranked foreground patterns.

    ``i`` and ``j`` index the score-ranked foreground terms.  Rows are
    transformed into the model's reduced space first when the model carries a
    PCA basis.
    """
    if i == j:
        raise ValueError("pattern indices must differ")
    count = len(model.foreground)
    if not (0 <= i < count and 0 <= j < count):
        raise ValueError(f"pattern indices ({i}, {j}) out of range for {count} patterns")
    d = np.asarray(data, dtype=float)
    if model.pca is not None:
        d = pca_transform(d, model.pca)
    b = model.foreground_matrix
    if d.shape[1] != b.shape[0]:
        raise ValueError(
            f"data has {d.shape[1]} columns but patterns live in dimension {b.shape[0]}"
        )
    return np.column_stack([d @ b[:, i], d @ b[:, j]])
