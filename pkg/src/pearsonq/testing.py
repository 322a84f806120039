"""The four proposed tests: normality, delta = 0, symmetry, Poisson.

Each ``test_*`` function takes a :class:`~pearsonq.moments.Sample` and
returns a :class:`TestOutcome`.  The ``*_statistic`` functions work on
arrays of moments and are what the Monte Carlo harness calls.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import asymptotics
from .errors import DataError, UnsupportedAlpha
from .estimators import estimate_continuous, estimate_discrete
from .moments import Case, Sample, assert_nondegenerate, central_moments
from .quantiles import chi2_sf, chi2_upper, normal_two_sided_p, normal_upper

LEVELS = (0.10, 0.05, 0.025, 0.01)
_COLUMNS = ("p90", "p95", "p975", "p99")


@dataclass(frozen=True)
class TestOutcome:
    """Result of one hypothesis test.

    ``p_value`` is None for the small-sample normality test, which only
    brackets the p-value between tabulated levels (``p_bracket``).
    """

    __test__ = False  # keep pytest from collecting this class

    test: str
    statistic: float
    reference: str
    critical_value: float
    p_value: float | None
    alpha: float
    reject: bool
    p_bracket: tuple | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        # plain Python scalars so outcomes serialise cleanly
        object.__setattr__(self, "statistic", float(self.statistic))
        object.__setattr__(self, "critical_value", float(self.critical_value))
        object.__setattr__(self, "reject", bool(self.reject))
        object.__setattr__(self, "extra", {k: float(v) if isinstance(v, np.floating) else v
                                           for k, v in self.extra.items()})

    def to_dict(self):
        return {
            "test": self.test,
            "statistic": self.statistic,
            "reference": self.reference,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "p_bracket": list(self.p_bracket) if self.p_bracket else None,
            "alpha": self.alpha,
            "reject": self.reject,
            **self.extra,
        }


@dataclass(frozen=True)
class PercentileTable:
    """Upper percentiles ``(P0.90, P0.95, P0.975, P0.99)`` by sample size.

    ``asymptotic`` is the limiting row used beyond the largest tabulated n.
    """

    test: str
    rows: dict
    asymptotic: tuple | None = None
    provenance: str = "published"

    def sizes(self):
        return sorted(self.rows)

    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write(f"# test={self.test} provenance={self.provenance}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("n",) + _COLUMNS)
        for n in self.sizes():
            w.writerow([n] + [f"{v:.4f}" for v in self.rows[n]])
        if self.asymptotic is not None:
            w.writerow(["inf"] + [f"{v:.4f}" for v in self.asymptotic])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, path, test="normality", provenance=None):
        return cls.from_text(Path(path).read_text(encoding="utf-8"), test, provenance)

    @classmethod
    def from_text(cls, text, test="normality", provenance=None):
        rows, asym = {}, None
        meta = {}
        lines = []
        for line in text.splitlines():
            if line.startswith("#"):
                for tok in line[1:].split():
                    k, _, v = tok.partition("=")
                    if v:
                        meta[k] = v
            elif line.strip():
                lines.append(line)
        for rec in csv.DictReader(lines):
            vals = tuple(float(rec[c]) for c in _COLUMNS)
            if rec["n"].strip().lower() in ("inf", "infinity"):
                asym = vals
            else:
                rows[int(rec["n"])] = vals
        return cls(meta.get("test", test), rows, asym,
                   provenance or meta.get("provenance", "published"))


def shipped_table() -> PercentileTable:
    """Table of q_n percentiles shipped with the package."""
    text = resources.files("pearsonq").joinpath("data/normality_percentiles.csv").read_text()
    return PercentileTable.from_text(text, test="normality", provenance="published")


def _level_index(alpha):
    for i, lev in enumerate(LEVELS):
        if abs(alpha - lev) < 1e-12:
            return i
    raise UnsupportedAlpha(f"alpha={alpha} not tabulated; choose one of {LEVELS}")


def lookup_percentile(table: PercentileTable, n: int, alpha: float) -> float:
    """Critical value ``P_{1-alpha}`` for sample size ``n``.

    Uses the largest tabulated size not exceeding ``n``; sizes beyond the
    largest tabulated one use the asymptotic row.
    """
    return _lookup_row(table, n)[_level_index(alpha)]


def _lookup_row(table, n):
    sizes = table.sizes()
    if n > sizes[-1] and table.asymptotic is not None:
        return table.asymptotic
    below = [s for s in sizes if s <= n]
    if not below:
        raise DataError(f"no tabulated percentiles for n={n} (smallest is {sizes[0]})")
    return table.rows[below[-1]]


# --- vectorised statistics ---------------------------------------------------

def normality_statistic(n, delta, beta, m2):
    """``n * [(3/2) delta^2 + 2 beta^2 / (3 s^2)]`` with ``s^2 = n m2 / (n-1)``."""
    s2 = n / (n - 1) * np.asarray(m2, dtype=float)
    return n * (1.5 * np.square(delta) + 2.0 * np.square(beta) / (3.0 * s2))


def delta_zero_statistic(n, delta, m2, m3):
    return math.sqrt(n) * np.asarray(delta) / np.sqrt(asymptotics.sigma0_delta(m2, m3))


def symmetry_statistic(n, m2, m3, m4, m6):
    """``sqrt(n) m3 / sqrt(m6 - 6 m4 m2 + 9 m2^3)``; NaN where that variance is <= 0."""
    v = np.asarray(m6 - 6 * m4 * m2 + 9 * m2 ** 3, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(v > 0, math.sqrt(n) * m3 / np.sqrt(np.where(v > 0, v, 1.0)), np.nan)


def poisson_statistic(n, delta, beta, m2, mean, printed=False):
    """Returns ``(q, singular)``; ``q`` is NaN where no decision is possible."""
    v = np.stack(np.broadcast_arrays(delta, beta, np.asarray(m2) - mean), axis=-1)
    q, singular = asymptotics.poisson_quadratic_form(v, mean, printed=printed)
    return n * q, singular


# --- sample-level tests ----------------------------------------------------------

def _require_case(s: Sample, case: Case, test: str):
    if s.case is not case:
        raise DataError(f"{test} test needs a {case.value} sample, got {s.case.value}")


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise UnsupportedAlpha(f"alpha must be in (0, 1), got {alpha}")


def test_normality(s: Sample, alpha=0.05, mode="asymptotic", table=None) -> TestOutcome:
    """Test ``delta = beta = 0``.

    ``mode="asymptotic"`` compares with the chi-square(2) point;
    ``mode="small_sample"`` rejects when the statistic is at least the
    tabulated percentile for the sample size.
    """
    _require_case(s, Case.CONTINUOUS, "normality")
    _check_alpha(alpha)
    ms = central_moments(s, 4)
    assert_nondegenerate(ms, s)
    qp = estimate_continuous(ms)
    stat = float(normality_statistic(s.n, qp.delta, qp.beta, ms[2]))
    extra = {"n": s.n, "delta": qp.delta, "beta": qp.beta}
    if mode == "asymptotic":
        crit = chi2_upper(alpha, 2)
        return TestOutcome("normality", stat, "chi2(2)", crit, float(math.exp(-stat / 2)),
                           alpha, stat > crit, extra=extra)
    if mode != "small_sample":
        raise ValueError(f"unknown mode {mode!r}")
    table = shipped_table() if table is None else table
    row = _lookup_row(table, s.n)
    crit = row[_level_index(alpha)]
    bracket = _bracket(stat, row)
    extra["table"] = table.provenance
    return TestOutcome("normality", stat, "empirical_table", crit, None, alpha,
                       stat >= crit, p_bracket=bracket, extra=extra)


def _bracket(stat, row):
    hi = 1.0
    for lev, crit in zip(LEVELS, row):
        if stat >= crit:
            hi = lev
        else:
            return (lev, hi)
    return (0.0, hi)


def test_delta_zero(s: Sample, alpha=0.05) -> TestOutcome:
    """Two-sided z test of ``delta = 0``."""
    _require_case(s, Case.CONTINUOUS, "delta-zero")
    _check_alpha(alpha)
    ms = central_moments(s, 4)
    assert_nondegenerate(ms, s)
    qp = estimate_continuous(ms)
    z = float(delta_zero_statistic(s.n, qp.delta, ms[2], ms[3]))
    crit = normal_upper(alpha / 2)
    return TestOutcome("delta-zero", z, "std_normal", crit, float(normal_two_sided_p(z)),
                       alpha, abs(z) > crit, extra={"n": s.n, "delta": qp.delta})


def test_symmetry(s: Sample, alpha=0.05) -> TestOutcome:
    """Two-sided z test of ``m3 = 0`` (equivalently ``beta = 0``)."""
    _require_case(s, Case.CONTINUOUS, "symmetry")
    _check_alpha(alpha)
    ms = central_moments(s, 6)
    v = asymptotics.sigma0_symmetry(ms[2], ms[4], ms[6])
    z = float(math.sqrt(s.n) * ms[3] / math.sqrt(v))
    crit = normal_upper(alpha / 2)
    return TestOutcome("symmetry", z, "std_normal", crit, float(normal_two_sided_p(z)),
                       alpha, abs(z) > crit, extra={"n": s.n, "m3": ms[3]})


def test_poisson(s: Sample, alpha=0.05, printed=False) -> TestOutcome:
    """Chi-square(3) test of ``delta = beta = variance - mean = 0``.

    Raises
    ------
    ThetaDegenerate
        Fewer than three distinct values.
    SingularCovariance
        The estimated null covariance cannot be inverted.
    """
    _require_case(s, Case.DISCRETE, "poisson")
    _check_alpha(alpha)
    ms = central_moments(s, 4)
    assert_nondegenerate(ms, s)
    if not ms.mean > 0:
        raise DataError(f"poisson test needs a positive sample mean, got {ms.mean}")
    qp = estimate_discrete(ms)
    v = np.array([qp.delta, qp.beta, ms[2] - ms.mean])
    inv = asymptotics.inverse_3x3(asymptotics.null_cov_poisson(ms.mean, printed=printed))
    stat = float(s.n * v @ inv @ v)
    crit = chi2_upper(alpha, 3)
    return TestOutcome("poisson", stat, "chi2(3)", crit, float(chi2_sf(stat, 3)), alpha,
                       stat > crit, extra={"n": s.n, "delta": qp.delta, "beta": qp.beta,
                                           "dispersion": float(v[2])})


for _f in (test_normality, test_delta_zero, test_symmetry, test_poisson):
    _f.__test__ = False

PROPOSED = {
    "normality": test_normality,
    "delta-zero": test_delta_zero,
    "symmetry": test_symmetry,
    "poisson": test_poisson,
}
