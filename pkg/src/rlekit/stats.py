"""RLE statistics: per-feature medians, deviations, and boxplot summaries.

An RLE (relative log expression) summary is built in two steps: subtract
each feature's across-sample median from that feature's column, then
summarise each sample's row of deviations as a boxplot. Standard boxplot
summaries skip the median-subtraction step.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import defaults, kernels
from .matrix import ExpressionMatrix

__all__ = [
    "DeviationMatrix",
    "BoxplotStats",
    "gene_medians",
    "rle_deviations",
    "boxplot_stats",
    "rle_summary",
    "standard_boxplot_summary",
    "summaries_to_json",
    "summaries_from_json",
    "summaries_to_csv",
]


@dataclass(frozen=True)
class DeviationMatrix:
    """Per-feature median deviations; every column has median zero."""

    deviations: np.ndarray
    sample_ids: tuple[str, ...]
    feature_ids: tuple[str, ...]
    groups: tuple[str, ...] | None = None

    def __post_init__(self):
        dev = np.asarray(self.deviations, dtype=np.float64)
        dev.setflags(write=False)
        object.__setattr__(self, "deviations", dev)


@dataclass(frozen=True)
class BoxplotStats:
    """Five-number summary plus outliers for one sample's values."""

    sample_id: str
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...] = ()
    group: str | None = field(default=None)

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


def gene_medians(matrix: ExpressionMatrix) -> np.ndarray:
    """Median of each feature across samples (mean of the middle pair for even counts)."""
    return kernels.column_medians(matrix.values)


def rle_deviations(matrix: ExpressionMatrix) -> DeviationMatrix:
    """Deviations of every value from its feature's across-sample median."""
    if matrix.n_samples < 2:
        warnings.warn("RLE deviations of a single sample are identically zero")
    med = gene_medians(matrix)
    return DeviationMatrix(matrix.values - med[np.newaxis, :], matrix.sample_ids,
                           matrix.feature_ids, matrix.groups)


def boxplot_stats(values, quantile_method: str = defaults.QUANTILE_METHOD,
                  whisker_coef: float = defaults.WHISKER_COEF,
                  sample_id: str = "", group: str | None = None) -> BoxplotStats:
    """Boxplot summary of one value set.

    ``quantile_method`` is ``"linear"`` (type-7 interpolation, the default)
    or ``"hinges"`` (Tukey hinges); the choice affects q1/q3 but never the
    median. Whiskers sit on the most extreme data points within
    ``whisker_coef`` * IQR of the box; everything beyond is an outlier.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise ValueError("cannot summarise an empty value set")
    if not np.isfinite(arr).all():
        raise ValueError("values must be finite")
    if whisker_coef <= 0:
        raise ValueError(f"whisker_coef must be > 0, got {whisker_coef}")
    if quantile_method not in kernels.METHOD_CODES:
        raise ValueError(f"unknown quantile method {quantile_method!r}")
    stats, outliers, _ = kernels.row_summaries(
        arr[np.newaxis, :], np.zeros(arr.size), quantile_method, whisker_coef)
    med, q1, q3, wlo, whi = (float(x) for x in stats[0])
    return BoxplotStats(sample_id, med, q1, q3, wlo, whi,
                        tuple(float(x) for x in outliers), group)


def _summaries(matrix: ExpressionMatrix, center: np.ndarray,
               quantile_method: str, whisker_coef: float) -> list[BoxplotStats]:
    if whisker_coef <= 0:
        raise ValueError(f"whisker_coef must be > 0, got {whisker_coef}")
    if quantile_method not in kernels.METHOD_CODES:
        raise ValueError(f"unknown quantile method {quantile_method!r}")
    stats, outliers, offsets = kernels.row_summaries(
        matrix.values, center, quantile_method, whisker_coef)
    groups = matrix.groups or (None,) * matrix.n_samples
    out = []
    for i, sid in enumerate(matrix.sample_ids):
        med, q1, q3, wlo, whi = (float(x) for x in stats[i])
        row_outliers = tuple(float(x) for x in outliers[offsets[i]:offsets[i + 1]])
        out.append(BoxplotStats(sid, med, q1, q3, wlo, whi, row_outliers, groups[i]))
    return out


def rle_summary(matrix: ExpressionMatrix,
                quantile_method: str = defaults.QUANTILE_METHOD,
                whisker_coef: float = defaults.WHISKER_COEF) -> list[BoxplotStats]:
    """One boxplot summary per sample of its RLE deviations.

    Streams one sample at a time (O(n) scratch per sample) rather than
    materialising the full deviation matrix.
    """
    if matrix.n_samples < 2:
        warnings.warn("RLE deviations of a single sample are identically zero")
    med = gene_medians(matrix)
    return _summaries(matrix, med, quantile_method, whisker_coef)


def standard_boxplot_summary(matrix: ExpressionMatrix,
                             quantile_method: str = defaults.QUANTILE_METHOD,
                             whisker_coef: float = defaults.WHISKER_COEF) -> list[BoxplotStats]:
    """One boxplot summary per sample of its raw values (no median step)."""
    return _summaries(matrix, np.zeros(matrix.n_features), quantile_method, whisker_coef)


# ---------------------------------------------------------------------------
# Serialisation of summary lists.

def summaries_to_json(summaries: list[BoxplotStats]) -> str:
    records = [
        {
            "sample": s.sample_id,
            "group": s.group,
            "median": s.median,
            "q1": s.q1,
            "q3": s.q3,
            "whisker_low": s.whisker_low,
            "whisker_high": s.whisker_high,
            "outliers": list(s.outliers),
        }
        for s in summaries
    ]
    return json.dumps(records, indent=2) + "\n"


def summaries_from_json(text: str) -> list[BoxplotStats]:
    records = json.loads(text)
    if not isinstance(records, list):
        raise ValueError("summary JSON must be an array of objects")
    out = []
    for rec in records:
        out.append(BoxplotStats(
            sample_id=str(rec["sample"]),
            median=float(rec["median"]),
            q1=float(rec["q1"]),
            q3=float(rec["q3"]),
            whisker_low=float(rec["whisker_low"]),
            whisker_high=float(rec["whisker_high"]),
            outliers=tuple(float(x) for x in rec.get("outliers", [])),
            group=None if rec.get("group") is None else str(rec["group"]),
        ))
    return out


def summaries_to_csv(summaries: list[BoxplotStats]) -> str:
    """CSV with one row per sample; outliers joined by semicolons."""
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample", "group", "median", "q1", "q3",
                     "whisker_low", "whisker_high", "outliers"])
    for s in summaries:
        writer.writerow([
            s.sample_id,
            "" if s.group is None else s.group,
            "%.17g" % s.median,
            "%.17g" % s.q1,
            "%.17g" % s.q3,
            "%.17g" % s.whisker_low,
            "%.17g" % s.whisker_high,
            ";".join("%.17g" % x for x in s.outliers),
        ])
    return buf.getvalue()
