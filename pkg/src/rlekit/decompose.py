"""Removal of additive sample effects and SVD partition of what remains.

Workflow: center each sample's row to strip the additive sample effect,
double-center to isolate the non-additive (interaction) residual, then
split that residual into rank-1 multiplicative components by SVD. Each
component is (scale) x (sample factor) x (gene factor); subtracting the
leading components from the centered matrix removes non-additive sample
effects one at a time.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import defaults
from .matrix import ExpressionMatrix
from .stats import BoxplotStats, rle_summary

__all__ = [
    "DecompositionResult",
    "remove_additive_sample_effect",
    "twoway_residual",
    "svd_partition",
    "remove_nonadditive",
    "decompose",
    "rle_series",
]


def _values(matrix) -> np.ndarray:
    if isinstance(matrix, ExpressionMatrix):
        return matrix.values
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class DecompositionResult:
    """Centered matrix, its two-way residual, and the residual's SVD.

    ``sample_factors[:, k]`` and ``gene_factors[:, k]`` are the unit
    factors of the k-th rank-1 component (0-based), ordered by descending
    scale. Signs are fixed so each sample factor's largest-magnitude entry
    is positive, making the decomposition reproducible run to run.
    """

    centered: np.ndarray
    residual: np.ndarray
    singular_values: np.ndarray
    sample_factors: np.ndarray
    gene_factors: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.singular_values.size)

    def component(self, k: int) -> np.ndarray:
        """The k-th rank-1 component of the residual (0-based)."""
        if not 0 <= k < self.rank:
            raise ValueError(f"component index {k} outside 0..{self.rank - 1}")
        return self.singular_values[k] * np.outer(self.sample_factors[:, k],
                                                  self.gene_factors[:, k])

    def corrected(self, p: int) -> np.ndarray:
        """Centered matrix with the first ``p`` components subtracted."""
        if not 0 <= p <= self.rank:
            raise ValueError(f"p must lie in 0..{self.rank}, got {p}")
        if p == 0:
            return self.centered.copy()
        scaled = self.sample_factors[:, :p] * self.singular_values[:p]
        return self.centered - scaled @ self.gene_factors[:, :p].T


def remove_additive_sample_effect(matrix, center: str = "sample") -> np.ndarray:
    """Subtract each sample's mean across genes (its additive effect).

    ``center="gene"`` instead subtracts each gene's mean across samples;
    note that gene centering leaves RLE summaries unchanged, since RLE
    deviations are invariant to per-gene shifts.
    """
    values = _values(matrix)
    if values.shape[0] < 2 or values.shape[1] < 2:
        raise ValueError("need at least 2 samples and 2 genes")
    if center == "sample":
        return values - values.mean(axis=1, keepdims=True)
    if center == "gene":
        return values - values.mean(axis=0, keepdims=True)
    raise ValueError(f"center must be 'sample' or 'gene', got {center!r}")


def twoway_residual(matrix) -> np.ndarray:
    """Double-centered matrix: value + grand mean - row mean - column mean.

    This is the standard estimate of the non-additive component of a
    two-way layout; all row means and column means of the result are zero.
    """
    values = _values(matrix)
    if values.shape[0] < 2 or values.shape[1] < 2:
        raise ValueError("need at least 2 samples and 2 genes")
    return (values + values.mean()
            - values.mean(axis=1, keepdims=True)
            - values.mean(axis=0, keepdims=True))


def svd_partition(d_prime, rank_tol: float = defaults.RANK_TOL):
    """Ordered rank-1 components of a double-centered matrix.

    Returns ``(singular_values, sample_factors, gene_factors)`` with
    scales descending and components at or below ``rank_tol`` times the
    leading scale discarded (a zero matrix yields rank 0). Warns if the
    input is not double-centered.
    """
    d = _values(d_prime)
    scale = np.abs(d).max() if d.size else 0.0
    if scale > 0.0:
        worst = max(np.abs(d.mean(axis=1)).max(), np.abs(d.mean(axis=0)).max())
        if worst > 1e-8 * scale:
            warnings.warn("matrix is not double-centered; partition components "
                          "will mix additive and non-additive effects")
    try:
        u, s, vt = np.linalg.svd(d, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"SVD failed to converge: {exc}") from exc
    if s.size == 0 or s[0] <= 0.0:
        return np.empty(0), np.empty((d.shape[0], 0)), np.empty((d.shape[1], 0))
    keep = s > rank_tol * s[0]
    u, s, vt = u[:, keep], s[keep], vt[keep, :]

    # Deterministic signs: largest-magnitude entry of each sample factor positive.
    for k in range(s.size):
        idx = np.argmax(np.abs(u[:, k]))
        if u[idx, k] < 0:
            u[:, k] = -u[:, k]
            vt[k, :] = -vt[k, :]

    # Exact ties in scale are ordered by the sample factors' entries.
    order = sorted(range(s.size), key=lambda k: (-s[k], tuple(u[:, k])))
    order = np.asarray(order, dtype=np.int64)
    return s[order], u[:, order], vt[order, :].T


def remove_nonadditive(y_prime, decomposition: DecompositionResult, p: int) -> np.ndarray:
    """Subtract the first ``p`` rank-1 components from a centered matrix."""
    values = _values(y_prime)
    if not 0 <= p <= decomposition.rank:
        raise ValueError(f"p must lie in 0..{decomposition.rank}, got {p}")
    if p == 0:
        return values.copy()
    scaled = decomposition.sample_factors[:, :p] * decomposition.singular_values[:p]
    return values - scaled @ decomposition.gene_factors[:, :p].T


def decompose(matrix, rank_tol: float = defaults.RANK_TOL,
              center: str = "sample") -> DecompositionResult:
    """Full pipeline: center rows, double-center, partition by SVD."""
    centered = remove_additive_sample_effect(matrix, center=center)
    residual = twoway_residual(matrix)
    s, u, v = svd_partition(residual, rank_tol)
    return DecompositionResult(centered, residual, s, u, v)


def rle_series(matrix: ExpressionMatrix, p_max: int,
               rank_tol: float = defaults.RANK_TOL,
               quantile_method: str = defaults.QUANTILE_METHOD,
               whisker_coef: float = defaults.WHISKER_COEF,
               ) -> list[tuple[int, list[BoxplotStats]]]:
    """RLE summaries of the corrected matrix for each p in 0..p_max.

    p = 0 is the row-centered matrix itself; each further step subtracts
    one more rank-1 component of the non-additive residual.
    """
    decomp = decompose(matrix, rank_tol)
    if p_max > decomp.rank:
        raise ValueError(
            f"p_max {p_max} exceeds the residual's rank {decomp.rank}")
    if p_max < 0:
        raise ValueError(f"p_max must be >= 0, got {p_max}")
    series = []
    for p in range(p_max + 1):
        corrected = ExpressionMatrix(decomp.corrected(p), matrix.sample_ids,
                                     matrix.feature_ids, matrix.groups)
        series.append((p, rle_summary(corrected, quantile_method, whisker_coef)))
    return series
