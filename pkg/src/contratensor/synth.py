"""Seeded synthetic foreground/background generator with known ground truth.

Background rows are ``A z`` and foreground rows ``A z' + B s`` for independent
exponential sources.  Sources are parameterized by their scale ``theta``
(the mean, NumPy's convention), so a source with scale ``theta`` has fourth
cumulant ``6 theta^4``.  The default schedules alternate between columns:
salient sources ``s_i`` use scale 2 on even 0-based columns and 1.5 on odd
ones; shared sources use scales (2, 1) / (1, 2) alternating in ``general``
mode and scale 1 everywhere in ``proportional`` mode, which makes the true
proportionality constant 1.

All randomness comes from a single NumPy PCG64 stream seeded by the spec, in
a fixed draw order (mixing matrices, then background sources, then foreground
sources), so identical specs reproduce identical datasets bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SyntheticSpec",
    "GroundTruth",
    "random_unit_columns",
    "random_orthonormal",
    "generate",
]


def _alternating(first: float, second: float, count: int) -> tuple[float, ...]:
    return tuple(first if i % 2 == 0 else second for i in range(count))


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic foreground/background pair.

    ``scale_salient``, ``scale_shared_bg`` and ``scale_shared_fg`` override
    the default exponential-scale schedules; ``None`` selects the mode
    defaults described in the module docstring.
    """

    dim: int
    rank_bg: int
    rank_fg: int
    n_fg: int = 100_000
    n_bg: int = 100_000
    seed: int = 0
    mode: str = "general"
    scale_salient: tuple[float, ...] | None = None
    scale_shared_bg: tuple[float, ...] | None = None
    scale_shared_fg: tuple[float, ...] | None = None
    orthonormal_fg: bool = True

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.rank_bg < 1:
            raise ValueError("rank_bg must be positive")
        if self.rank_fg < 0:
            raise ValueError("rank_fg must be nonnegative")
        if self.orthonormal_fg and self.rank_fg > self.dim:
            raise ValueError("orthonormal foreground patterns need rank_fg <= dim")
        if self.n_fg < 1 or self.n_bg < 1:
            raise ValueError("sample counts must be positive")
        if self.mode not in ("general", "proportional"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in ("scale_salient", "scale_shared_bg", "scale_shared_fg"):
            scales = getattr(self, name)
            count = self.rank_fg if name == "scale_salient" else self.rank_bg
            if scales is not None:
                if len(scales) != count:
                    raise ValueError(f"{name} needs {count} entries, got {len(scales)}")
                if any(s <= 0 for s in scales):
                    raise ValueError(f"{name} scales must be positive")

    def salient_scales(self) -> tuple[float, ...]:
        if self.scale_salient is not None:
            return self.scale_salient
        return _alternating(2.0, 1.5, self.rank_fg)

    def shared_scales(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Scales of the shared sources, ``(background, foreground)``."""
        if self.mode == "proportional":
            bg = _alternating(1.0, 1.0, self.rank_bg)
            fg = bg
        else:
            bg = _alternating(2.0, 1.0, self.rank_bg)
            fg = _alternating(1.0, 2.0, self.rank_bg)
        if self.scale_shared_bg is not None:
            bg = self.scale_shared_bg
        if self.scale_shared_fg is not None:
            fg = self.scale_shared_fg
        return bg, fg


@dataclass(frozen=True)
class GroundTruth:
    """True mixing matrices and source parameters behind a generated pair."""

    mixing_bg: np.ndarray
    mixing_fg: np.ndarray
    scale_salient: tuple[float, ...]
    scale_shared_bg: tuple[float, ...]
    scale_shared_fg: tuple[float, ...]
    gamma: float | None


def _unit_columns(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    cols = rng.standard_normal((dim, count))
    cols /= np.linalg.norm(cols, axis=0)
    return cols


def _orthonormal(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    if count > dim:
        raise ValueError(f"cannot fit {count} orthonormal columns in dimension {dim}")
    cols = rng.standard_normal((dim, count))
    # Gram-Schmidt with re-normalization; rotation invariant start.
    for j in range(count):
        for i in range(j):
            cols[:, j] -= (cols[:, i] @ cols[:, j]) * cols[:, i]
        norm = np.linalg.norm(cols[:, j])
        if norm < 1e-12:
            cols[:, j] = rng.standard_normal(dim)
            norm = np.linalg.norm(cols[:, j])
            for i in range(j):
                cols[:, j] -= (cols[:, i] @ cols[:, j]) * cols[:, i]
            norm = np.linalg.norm(cols[:, j])
        cols[:, j] /= norm
    return cols


def random_unit_columns(dim: int, count: int, seed: int) -> np.ndarray:
    """``dim x count`` matrix with independent random unit columns."""
    return _unit_columns(np.random.default_rng(seed), dim, count)


def random_orthonormal(dim: int, count: int, seed: int) -> np.ndarray:
    """``dim x count`` matrix with random orthonormal columns."""
    return _orthonormal(np.random.default_rng(seed), dim, count)


def generate(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray, GroundTruth]:
    """Draw ``(foreground, background, truth)`` for a synthetic spec.

    Sources are used uncentered; cumulants of order two and above are shift
    invariant so centering would change nothing downstream.
    """
    rng = np.random.default_rng(spec.seed)
    mixing_bg = _unit_columns(rng, spec.dim, spec.rank_bg)
    if spec.rank_fg > 0:
        if spec.orthonormal_fg:
            mixing_fg = _orthonormal(rng, spec.dim, spec.rank_fg)
        else:
            mixing_fg = _unit_columns(rng, spec.dim, spec.rank_fg)
    else:
        mixing_fg = np.zeros((spec.dim, 0))
    scale_bg, scale_fg = spec.shared_scales()
    scale_s = spec.salient_scales()

    z = rng.exponential(scale=scale_bg, size=(spec.n_bg, spec.rank_bg))
    z_prime = rng.exponential(scale=scale_fg, size=(spec.n_fg, spec.rank_bg))
    background = z @ mixing_bg.T
    foreground = z_prime @ mixing_bg.T
    if spec.rank_fg > 0:
        s = rng.exponential(scale=scale_s, size=(spec.n_fg, spec.rank_fg))
        foreground = foreground + s @ mixing_fg.T

    truth = GroundTruth(
        mixing_bg=mixing_bg,
        mixing_fg=mixing_fg,
        scale_salient=scale_s,
        scale_shared_bg=scale_bg,
        scale_shared_fg=scale_fg,
        gamma=1.0 if spec.mode == "proportional" else None,
    )
    return foreground, background, truth
