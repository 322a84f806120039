"""Samples, sample central moments and the degeneracy check.

All central moments use divisor ``n``.  The single-sample path sums with
:func:`math.fsum` in both passes; the batched path used by the Monte Carlo
harness works row-wise on 2-D arrays.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, ThetaDegenerate

INTEGER_TOL = 1e-9


class Case(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"

    @classmethod
    def parse(cls, value) -> "Case":
        if isinstance(value, Case):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DataError(f"unknown case {value!r}; expected continuous or discrete") from None


@dataclass(frozen=True)
class Sample:
    """An ordered batch of finite observations plus a case flag.

    Discrete samples are validated to be integer valued (within
    ``INTEGER_TOL``) and stored rounded.
    """

    values: np.ndarray
    case: Case = Case.CONTINUOUS
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        case = Case.parse(self.case)
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size < 1:
            raise DataError("empty sample")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise DataError(f"non-finite value at position {bad}")
        if case is Case.DISCRETE:
            rounded = np.round(vals)
            off = np.abs(vals - rounded) > INTEGER_TOL
            if off.any():
                bad = int(np.flatnonzero(off)[0])
                raise DataError(
                    f"discrete sample has non-integer value {vals[bad]!r} at position {bad}"
                )
            vals = rounded
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "case", case)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def distinct(self) -> int:
        return int(np.unique(self.values).size)

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class MomentSet:
    """Mean, central moments ``m[k]`` (k = 2..max_order) and theta."""

    mean: float
    m: dict
    theta: float = float("nan")

    @property
    def max_order(self) -> int:
        return max(self.m)

    def __getitem__(self, k):
        if k == 1:
            return 0.0
        return self.m[k]


def theta_of(m2, m3, m4):
    """``m4*m2 - m3**2 - m2**3``; works elementwise on arrays."""
    return m4 * m2 - m3 * m3 - m2 * m2 * m2


def theta_epsilon(m2):
    return 1e-12 * np.maximum(1.0, m2 * m2 * m2)


def ingest_csv(path, column=None, case=Case.CONTINUOUS) -> Sample:
    """Read one numeric column from a CSV file.

    Lines starting with ``#`` and blank lines are skipped, as is a single
    header row (the first non-comment row, if any cell in it is not a
    number).  ``column`` may be a header name or a 0-based index.

    The returned sample's ``meta`` holds ``rows`` (values read) and
    ``skipped`` (comment, blank and header lines).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    values = []
    skipped = 0
    header = None
    col_idx = None
    seen_first = False
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
            skipped += 1
            continue
        cells = [c.strip() for c in row]
        if not seen_first:
            seen_first = True
            if not all(_is_number(c) for c in cells):
                header = cells
                skipped += 1
                continue
        if col_idx is None:
            col_idx = _resolve_column(column, header, len(cells))
        if col_idx >= len(cells):
            raise DataError(f"row {lineno}: missing column {col_idx}")
        cell = cells[col_idx]
        try:
            val = float(cell)
        except ValueError:
            raise DataError(f"row {lineno}: non-numeric cell {cell!r}") from None
        if not math.isfinite(val):
            raise DataError(f"row {lineno}: non-finite value {cell!r}")
        values.append(val)

    if not values:
        raise DataError(f"{path}: no numeric data")
    return Sample(np.array(values), case, meta={"rows": len(values), "skipped": skipped,
                                                "source": str(path)})


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _resolve_column(column, header, width):
    if column is None:
        return 0
    if isinstance(column, int) or str(column).lstrip("-").isdigit():
        idx = int(column)
        if idx < 0 or idx >= width:
            raise DataError(f"column index {idx} out of range (width {width})")
        return idx
    if header is None:
        raise DataError(f"column {column!r} requested but file has no header row")
    try:
        return header.index(str(column))
    except ValueError:
        raise DataError(f"column {column!r} not in header {header}") from None


def central_moments(s, max_order=4) -> MomentSet:
    """Two-pass compensated central moments of a sample.

    Parameters
    ----------
    s : Sample or array_like
    max_order : int
        Highest moment order, between 2 and 8.

    Returns
    -------
    MomentSet
        ``theta`` is NaN when ``max_order < 4``.
    """
    if not isinstance(max_order, (int, np.integer)) or not 2 <= max_order <= 8:
        raise ValueError(f"max_order must be an integer in 2..8, got {max_order!r}")
    x = s.values if isinstance(s, Sample) else np.asarray(s, dtype=float).ravel()
    n = x.size
    if n < 1:
        raise DataError("empty sample")
    mean = math.fsum(x) / n
    # One refinement step absorbs the rounding of the first mean.
    mean += math.fsum(x - mean) / n
    c = x - mean
    m = {}
    p = c * c
    m[2] = math.fsum(p) / n
    for k in range(3, max_order + 1):
        p = p * c
        m[k] = math.fsum(p) / n
    theta = theta_of(m[2], m[3], m[4]) if max_order >= 4 else float("nan")
    return MomentSet(mean=mean, m=m, theta=theta)


def central_moments_rows(x, max_order=4):
    """Row-wise central moments of a 2-D array (one sample per row).

    Returns ``(mean, m)`` with ``m`` a dict of 1-D arrays.  Used on the
    Monte Carlo hot path, where :func:`math.fsum` per row is too slow;
    numpy's pairwise summation plus a mean refinement step is used instead.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    mean = x.sum(axis=-1) / n
    c = x - mean[..., None]
    corr = c.sum(axis=-1) / n
    mean = mean + corr
    c -= corr[..., None]
    m = {}
    p = c * c
    m[2] = p.sum(axis=-1) / n
    for k in range(3, max_order + 1):
        p *= c
        m[k] = p.sum(axis=-1) / n
    return mean, m


def assert_nondegenerate(ms: MomentSet, s: Sample | None = None) -> None:
    """Raise :class:`ThetaDegenerate` unless the estimators are defined.

    Requires at least three distinct values (when the sample is given) and
    ``theta > 1e-12 * max(1, m2**3)``.
    """
    distinct = s.distinct if s is not None else None
    theta = ms.theta
    if math.isnan(theta):
        raise ValueError("moment set lacks orders up to 4")
    if (s is not None and distinct < 3) or not theta > theta_epsilon(ms.m[2]):
        raise ThetaDegenerate(distinct, theta)
