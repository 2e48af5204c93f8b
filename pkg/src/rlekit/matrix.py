"""Expression-matrix data model and delimited-file ingestion.

The canonical orientation is samples-as-rows: ``values[i, j]`` is the
log-scale value of feature ``j`` in sample ``i``. Files shipped the other
way round are transposed at load time via the ``orientation`` flag.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import defaults

__all__ = [
    "ExpressionMatrix",
    "ParseError",
    "load_matrix",
    "save_matrix",
    "log_transform",
    "attach_groups",
]

# Tokens treated as missing cells at ingestion.
_MISSING_TOKENS = {"", "na", "nan", "null"}


class ParseError(ValueError):
    """Raised when a delimited matrix file cannot be parsed."""


@dataclass(frozen=True)
class ExpressionMatrix:
    """Immutable m-samples x n-features matrix of finite log-scale values.

    ``groups`` optionally labels each sample with a batch/laboratory/...
    tag used for colour coding downstream. All operations in this package
    return new matrices; instances are safe to share across threads.
    """

    values: np.ndarray
    sample_ids: tuple[str, ...]
    feature_ids: tuple[str, ...]
    groups: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        if values.size == 0:
            raise ValueError("matrix is empty")
        m, n = values.shape
        sample_ids = tuple(str(s) for s in self.sample_ids)
        feature_ids = tuple(str(f) for f in self.feature_ids)
        if len(sample_ids) != m:
            raise ValueError(f"expected {m} sample ids, got {len(sample_ids)}")
        if len(feature_ids) != n:
            raise ValueError(f"expected {n} feature ids, got {len(feature_ids)}")
        _check_unique(sample_ids, "sample id")
        _check_unique(feature_ids, "feature id")
        groups = self.groups
        if groups is not None:
            groups = tuple(str(g) for g in groups)
            if len(groups) != m:
                raise ValueError(f"expected {m} group labels, got {len(groups)}")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            i, j = bad[0]
            raise ValueError(
                f"non-finite value at sample {sample_ids[i]!r}, "
                f"feature {feature_ids[j]!r}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_ids", sample_ids)
        object.__setattr__(self, "feature_ids", feature_ids)
        object.__setattr__(self, "groups", groups)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def with_values(self, values: np.ndarray) -> "ExpressionMatrix":
        """New matrix with the same ids/groups and different values."""
        return ExpressionMatrix(values, self.sample_ids, self.feature_ids, self.groups)


def _check_unique(ids, kind):
    seen = set()
    for x in ids:
        if x in seen:
            raise ValueError(f"duplicate {kind} {x!r}")
        seen.add(x)


def _pick_delimiter(path, delimiter):
    if delimiter is not None:
        return delimiter
    p = str(path).lower()
    if p.endswith(".tsv") or p.endswith(".tab") or p.endswith(".txt"):
        return "\t"
    return ","


def load_matrix(
    path,
    *,
    delimiter: str | None = None,
    orientation: str = defaults.ORIENTATION,
    header: bool = True,
    drop_missing: bool = False,
) -> ExpressionMatrix:
    """Load a delimited matrix file.

    Parameters
    ----------
    path : str or Path
        Delimited text file. The delimiter is inferred from the extension
        (``.tsv``/``.tab``/``.txt`` are tab, everything else comma) unless
        given explicitly.
    orientation : {"samples", "features"}
        Whether file rows are samples (canonical) or features. A
        features-as-rows file is transposed after parsing.
    header : bool
        When true the first row and first column carry ids (row ids for
        whatever the rows are, column ids likewise). When false, ids
        default to ``S1..Sm`` and ``G1..Gn``.
    drop_missing : bool
        Missing cells ("", NA, NaN, null) are rejected by default because
        a median over an incomplete feature silently changes the sample
        count per feature. With this flag, any feature containing a
        missing cell is dropped instead.
    """
    if orientation not in ("samples", "features"):
        raise ValueError(f"orientation must be 'samples' or 'features', got {orientation!r}")
    delim = _pick_delimiter(path, delimiter)
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    with fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh, delimiter=delim), start=1)
                if row and not all(c.strip() == "" for c in row)]
    if not rows:
        raise ParseError(f"{path}: file contains no data")

    col_ids: list[str] | None = None
    row_ids: list[str] | None = None
    id_offset = 0
    if header:
        header_line, header_row = rows[0]
        data_rows = rows[1:]
        if not data_rows:
            raise ParseError(f"{path}: header but no data rows")
        width = len(data_rows[0][1])
        if len(header_row) == width:
            # corner label present in the header row
            col_ids = [c.strip() for c in header_row[1:]]
        elif len(header_row) == width - 1:
            col_ids = [c.strip() for c in header_row]
        else:
            raise ParseError(
                f"{path}: line {header_line}: header has {len(header_row)} fields, "
                f"data rows have {width}"
            )
        row_ids = []
        id_offset = 1
    else:
        data_rows = rows

    width = len(data_rows[0][1])
    n_vals = width - id_offset
    if n_vals < 1:
        raise ParseError(f"{path}: no value columns")

    parsed = np.empty((len(data_rows), n_vals), dtype=np.float64)
    missing = np.zeros((len(data_rows), n_vals), dtype=bool)
    for r, (lineno, row) in enumerate(data_rows):
        if len(row) != width:
            raise ParseError(
                f"{path}: line {lineno}: expected {width} fields, got {len(row)} (ragged row)"
            )
        if header:
            row_ids.append(row[0].strip())
        for c in range(n_vals):
            cell = row[c + id_offset].strip()
            if cell.lower() in _MISSING_TOKENS:
                if drop_missing:
                    missing[r, c] = True
                    parsed[r, c] = np.nan
                    continue
                raise ParseError(
                    f"{path}: line {lineno}, column {c + id_offset + 1}: missing value"
                )
            try:
                parsed[r, c] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {lineno}, column {c + id_offset + 1}: "
                    f"non-numeric value {cell!r}"
                ) from None
            if not math.isfinite(parsed[r, c]):
                raise ParseError(
                    f"{path}: line {lineno}, column {c + id_offset + 1}: "
                    f"non-finite value {cell!r}"
                )

    if orientation == "features":
        parsed = parsed.T
        missing = missing.T
        sample_ids = col_ids
        feature_ids = row_ids
    else:
        sample_ids = row_ids
        feature_ids = col_ids

    m, n = parsed.shape
    if sample_ids is None:
        sample_ids = [f"S{i + 1}" for i in range(m)]
    if feature_ids is None:
        feature_ids = [f"G{j + 1}" for j in range(n)]

    if drop_missing:
        keep = ~missing.any(axis=0)
        if not keep.any():
            raise ParseError(f"{path}: every feature contains missing values")
        dropped = int(n - keep.sum())
        if dropped:
            warnings.warn(f"dropped {dropped} feature(s) containing missing values")
            parsed = parsed[:, keep]
            feature_ids = [f for f, k in zip(feature_ids, keep) if k]

    try:
        return ExpressionMatrix(parsed, tuple(sample_ids), tuple(feature_ids))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_matrix(matrix: ExpressionMatrix, path, *, delimiter: str | None = None,
                header: bool = True) -> None:
    """Write a matrix in the canonical layout (rows=samples, ids in headers).

    Values are written with 17 significant digits so a load/save/load
    round trip is bit-exact.
    """
    delim = _pick_delimiter(path, delimiter)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delim, lineterminator="\n")
        if header:
            writer.writerow(["id", *matrix.feature_ids])
        for i, sid in enumerate(matrix.sample_ids):
            cells = ["%.17g" % v for v in matrix.values[i]]
            writer.writerow([sid, *cells] if header else cells)


def log_transform(matrix: ExpressionMatrix, base: float = defaults.LOG_BASE,
                  offset: float = defaults.LOG_OFFSET) -> ExpressionMatrix:
    """Replace every value by log_base(value + offset)."""
    if base <= 1.0:
        raise ValueError(f"log base must be > 1, got {base}")
    if offset < 0.0:
        raise ValueError(f"offset must be >= 0, got {offset}")
    shifted = matrix.values + offset
    bad = np.argwhere(shifted <= 0.0)
    if bad.size:
        i, j = bad[0]
        raise ValueError(
            f"value + offset <= 0 at sample {matrix.sample_ids[i]!r}, "
            f"feature {matrix.feature_ids[j]!r}; cannot take log"
        )
    if base == 2.0:
        logged = np.log2(shifted)
    elif base == 10.0:
        logged = np.log10(shifted)
    else:
        logged = np.log(shifted) / np.log(base)
    return matrix.with_values(logged)


def attach_groups(matrix: ExpressionMatrix, labels: dict,
                  default: str | None = None) -> ExpressionMatrix:
    """Return a copy with group labels populated in sample order.

    Every key of ``labels`` must be a sample id of the matrix; samples not
    covered by the map take ``default`` when given, otherwise it is an
    error.
    """
    known = set(matrix.sample_ids)
    for key in labels:
        if key not in known:
            raise ValueError(f"group map names unknown sample {key!r}")
    groups = []
    for sid in matrix.sample_ids:
        if sid in labels:
            groups.append(str(labels[sid]))
        elif default is not None:
            groups.append(str(default))
        else:
            raise ValueError(f"sample {sid!r} has no group label and no default was given")
    return ExpressionMatrix(matrix.values, matrix.sample_ids, matrix.feature_ids,
                            tuple(groups))
