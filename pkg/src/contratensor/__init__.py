"""Contrastive pattern discovery via joint fourth-cumulant decompositions.

Estimate fourth-order cumulant tensors from a foreground and a background
dataset, decompose them jointly into rank-one patterns, rank the
foreground-only patterns, and project data onto them for exploration.
"""

from .cica import (
    BackgroundTerm,
    CicaModel,
    ForegroundTerm,
    PcaBasis,
    ScreeReport,
    back_project,
    fit_general,
    fit_proportional,
    pca_fit,
    pca_transform,
    project,
    rank_patterns,
    scree,
)
from .cumulants import build_exact_tensor, fourth_cumulant, sample_covariance, sample_mean
from .decomp import (
    DecompConfig,
    GammaEstimate,
    check_identifiable,
    decompose_general,
    deflate_background,
    estimate_gamma,
    fit_coefficient,
    identifiability_bound,
)
from .htd import htd, htd_error_bound
from .metrics import (
    align_columns,
    cpca_components,
    greedy_align,
    mean_cosine_similarity,
    relative_frobenius_error,
    silhouette,
)
from .synth import GroundTruth, SyntheticSpec, generate, random_orthonormal, random_unit_columns
from .tensor import (
    Decomposition,
    Rank1Term,
    SpectralPair,
    canonical_sign,
    contract3,
    flatten,
    load_symtensor4,
    quad_form,
    rank_one,
    reshape_vec,
    save_symtensor4,
    subtract_rank_ones,
    sym_eig,
    symmetrize,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundTerm",
    "CicaModel",
    "Decomposition",
    "DecompConfig",
    "ForegroundTerm",
    "GammaEstimate",
    "GroundTruth",
    "PcaBasis",
    "Rank1Term",
    "ScreeReport",
    "SpectralPair",
    "SyntheticSpec",
    "align_columns",
    "back_project",
    "build_exact_tensor",
    "canonical_sign",
    "check_identifiable",
    "contract3",
    "cpca_components",
    "decompose_general",
    "deflate_background",
    "estimate_gamma",
    "fit_coefficient",
    "fit_general",
    "fit_proportional",
    "flatten",
    "fourth_cumulant",
    "generate",
    "greedy_align",
    "htd",
    "htd_error_bound",
    "identifiability_bound",
    "load_symtensor4",
    "mean_cosine_similarity",
    "pca_fit",
    "pca_transform",
    "project",
    "quad_form",
    "random_orthonormal",
    "random_unit_columns",
    "rank_one",
    "rank_patterns",
    "relative_frobenius_error",
    "reshape_vec",
    "sample_covariance",
    "sample_mean",
    "save_symtensor4",
    "scree",
    "silhouette",
    "subtract_rank_ones",
    "sym_eig",
    "symmetrize",
]
