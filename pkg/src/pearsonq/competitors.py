"""Benchmark tests for normality and symmetry.

All statistics accept a :class:`~pearsonq.moments.Sample`, a 1-d array, or
a 2-d array with one sample per row.  Row-wise inputs return an array and
put NaN where the sample scale is zero; a single degenerate sample raises
:class:`~pearsonq.errors.DataError`.

Non-asymptotic critical values come from :func:`calibrate_critical_values`,
which simulates the standard-normal null with parameters re-estimated in
every replication.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import special

from .errors import DataError
from .moments import Sample
from .quantiles import chi2_upper

U_CLAMP = 1e-15
_DAG_MEAN = 0.28209479
_DAG_SD = 0.02998598


def _rows(s, min_n):
    x = s.values if isinstance(s, Sample) else np.asarray(s, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[-1] < min_n:
        raise DataError(f"need n >= {min_n}, got {x.shape[-1]}")
    return np.sort(x, axis=-1), single


def _finish(stat, bad, single, name):
    stat = np.where(bad, np.nan, stat)
    if single:
        if bad[0]:
            raise DataError(f"{name}: sample has zero spread")
        return float(stat[0])
    return stat


def _moments(x):
    mean = x.mean(axis=-1, keepdims=True)
    d = x - mean
    m2 = np.mean(d * d, axis=-1)
    return mean, d, m2


def _u_values(x):
    """Sorted ``Phi((x - mean) / s)`` per row, ``s`` with divisor n-1, clamped."""
    n = x.shape[-1]
    mean, d, m2 = _moments(x)
    bad = ~(m2 > 0)
    s = np.sqrt(np.where(bad, 1.0, m2) * n / (n - 1))
    u = special.ndtr(d / s[:, None])
    return np.clip(u, U_CLAMP, 1 - U_CLAMP), bad


def ks_from_u(u):
    """``max_i max(i/n - u_(i), u_(i) - (i-1)/n)`` for sorted ``u`` rows."""
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    return np.maximum((i / n - u).max(axis=-1), (u - (i - 1) / n).max(axis=-1))


def ad_from_u(u):
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    return -n - np.sum((2 * i - 1) * (np.log(u) + np.log1p(-u[..., ::-1])), axis=-1) / n


def cvm_from_u(u):
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    return np.sum((u - (2 * i - 1) / (2 * n)) ** 2, axis=-1) + 1 / (12 * n)


def za_from_u(u):
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    return -np.sum(np.log(u) / (n - i + 0.5) + np.log1p(-u) / (i - 0.5), axis=-1)


def zc_from_u(u):
    n = u.shape[-1]
    i = np.arange(1, n + 1)
    return np.sum(np.log((1 / u - 1) / ((n - 0.5) / (i - 0.75) - 1)) ** 2, axis=-1)


def _edf_stat(s, from_u, name):
    x, single = _rows(s, 4)
    u, bad = _u_values(x)
    return _finish(from_u(u), bad, single, name)


def ks_statistic(s):
    """Kolmogorov-Smirnov distance to the fitted normal (Lilliefors setting)."""
    return _edf_stat(s, ks_from_u, "ks")


def jarque_bera(s):
    """``n (b1/6 + (b2-3)^2/24)`` from sample skewness and kurtosis."""
    x, single = _rows(s, 2)
    n = x.shape[-1]
    _, d, m2 = _moments(x)
    bad = ~(m2 > 0)
    m2s = np.where(bad, 1.0, m2)
    b1 = np.mean(d ** 3, axis=-1) ** 2 / m2s ** 3
    b2 = np.mean(d ** 4, axis=-1) / m2s ** 2
    return _finish(n * (b1 / 6 + (b2 - 3) ** 2 / 24), bad, single, "bs")


def jarque_bera_from_moments(n, m2, m3, m4):
    """Same statistic from given central moments."""
    if not m2 > 0:
        raise DataError("bs: m2 must be positive")
    return n * (m3 ** 2 / m2 ** 3 / 6 + (m4 / m2 ** 2 - 3) ** 2 / 24)


def dagostino_d(s):
    """Standardized D'Agostino statistic ``Y``.

    ``D = sum_i (i - (n+1)/2) x_(i) / (n^2 sqrt(m2))`` and
    ``Y = sqrt(n) (D - 0.28209479) / 0.02998598``.  The test is two-sided.
    """
    x, single = _rows(s, 10)
    n = x.shape[-1]
    _, _, m2 = _moments(x)
    bad = ~(m2 > 0)
    w = np.arange(1, n + 1) - (n + 1) / 2
    dd = (x @ w) / (n * n * np.sqrt(np.where(bad, 1.0, m2)))
    y = math.sqrt(n) * (dd - _DAG_MEAN) / _DAG_SD
    return _finish(y, bad, single, "d")


def anderson_darling(s):
    return _edf_stat(s, ad_from_u, "ad")


def cramer_von_mises(s):
    return _edf_stat(s, cvm_from_u, "cvm")


def zhang_za(s):
    """Likelihood-ratio statistic ``Z_A``; large values reject."""
    return _edf_stat(s, za_from_u, "za")


def zhang_zc(s):
    """Likelihood-ratio statistic ``Z_C``; large values reject."""
    return _edf_stat(s, zc_from_u, "zc")


def cabilio_masaro(s):
    """``S_K = sqrt(n) (mean - median) / s`` with ``s`` using divisor n."""
    x, single = _rows(s, 4)
    n = x.shape[-1]
    mean, _, m2 = _moments(x)
    bad = ~(m2 > 0)
    med = np.median(x, axis=-1)
    sk = math.sqrt(n) * (mean[:, 0] - med) / np.sqrt(np.where(bad, 1.0, m2))
    return _finish(sk, bad, single, "cm")


@dataclass(frozen=True)
class Competitor:
    name: str
    statistic: object
    tail: str  # "upper" or "two-sided"
    family: str  # "normality" or "symmetry"
    min_n: int = 4


COMPETITORS = {
    "ks": Competitor("ks", ks_statistic, "upper", "normality"),
    "bs": Competitor("bs", jarque_bera, "upper", "normality"),
    "d": Competitor("d", dagostino_d, "two-sided", "normality", min_n=10),
    "ad": Competitor("ad", anderson_darling, "upper", "normality"),
    "cvm": Competitor("cvm", cramer_von_mises, "upper", "normality"),
    "za": Competitor("za", zhang_za, "upper", "normality"),
    "zc": Competitor("zc", zhang_zc, "upper", "normality"),
    "cm": Competitor("cm", cabilio_masaro, "two-sided", "symmetry"),
}


def get_competitor(name) -> Competitor:
    try:
        return COMPETITORS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown competitor {name!r}; choose from {sorted(COMPETITORS)}") from None


# --- critical values ---------------------------------------------------------

@dataclass(frozen=True)
class CriticalValueSet:
    """One critical value.

    ``tail`` is ``"upper"`` (reject when statistic > value), or ``"lower"``
    for the lower point of a two-sided test.  ``provenance`` is
    ``"published"`` or ``"monte_carlo"``, in which case ``seed`` and
    ``reps`` reproduce it.
    """

    test: str
    n: int
    alpha: float
    value: float
    provenance: str = "monte_carlo"
    tail: str = "upper"
    seed: int | None = None
    reps: int | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"critical value for {self.test} n={self.n} is not finite")


def asymptotic_critical_value(test, n, alpha):
    """Reference value when no calibration is used (``bs`` only: chi-square(2))."""
    if test != "bs":
        raise ValueError(f"{test} has no asymptotic reference here; calibrate it")
    return CriticalValueSet("bs", n, alpha, float(chi2_upper(alpha, 2)), "published")


NULL_LABEL = "null-normal"
CHUNK = 2000


def null_statistics(test, n, reps, seed, threads=1):
    """Null distribution of ``test`` at size ``n``: ``reps`` standard normal samples."""
    from .distributions import FamilySpec
    from .rng import draw_rows
    from .simharness import map_chunks

    comp = get_competitor(test)
    spec = FamilySpec.parse("normal")
    label = f"{NULL_LABEL}|n={n}"

    def work(start, stop):
        return comp.statistic(draw_rows(spec, n, seed, label, start, stop))

    return np.concatenate(map_chunks(work, reps, CHUNK, threads))


def calibrate_critical_values(test, n_list, alpha_list, reps, seed, threads=1):
    """Monte Carlo critical values under the normal null.

    Upper-tailed tests return the empirical ``1 - alpha`` quantile.  The
    two-sided tests return a lower and an upper value: ``d`` uses the
    ``alpha/2`` and ``1 - alpha/2`` quantiles; ``cm`` uses the ``1 - alpha``
    quantile of ``|S_K|`` (its null law is symmetric) and the negated value.

    Raises
    ------
    ValueError
        ``reps < 10**4``.
    """
    if reps < 10_000:
        raise ValueError(f"calibration needs reps >= 10000, got {reps}")
    comp = get_competitor(test)
    out = []
    for n in n_list:
        stats = null_statistics(comp.name, int(n), reps, seed, threads)
        stats = stats[np.isfinite(stats)]
        for a in alpha_list:
            def mk(v, tail):
                return CriticalValueSet(comp.name, int(n), float(a), float(v),
                                        "monte_carlo", tail, seed, reps)

            if comp.tail == "upper":
                out.append(mk(np.quantile(stats, 1 - a), "upper"))
            elif comp.name == "cm":
                c = np.quantile(np.abs(stats), 1 - a)
                out += [mk(-c, "lower"), mk(c, "upper")]
            else:
                lo, hi = np.quantile(stats, [a / 2, 1 - a / 2])
                out += [mk(lo, "lower"), mk(hi, "upper")]
    return out


_CV_FIELDS = ("test", "n", "alpha", "tail", "value", "provenance", "seed", "reps")


def critical_values_to_csv(cvs, path=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CV_FIELDS)
    for c in cvs:
        w.writerow([c.test, c.n, repr(c.alpha), c.tail, repr(c.value), c.provenance,
                    "" if c.seed is None else c.seed, "" if c.reps is None else c.reps])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def critical_values_from_csv(path):
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            out.append(CriticalValueSet(
                r["test"], int(r["n"]), float(r["alpha"]), float(r["value"]), r["provenance"],
                r["tail"], int(r["seed"]) if r["seed"] else None,
                int(r["reps"]) if r["reps"] else None))
    return out


class CriticalValueCache:
    """CSV-backed cache keyed by ``(test, n, alpha, seed, reps)``."""

    def __init__(self, path=None):
        self.path = Path(path) if path else None
        self._items = {}
        if self.path is not None and self.path.exists():
            for c in critical_values_from_csv(self.path):
                self._items[(c.test, c.n, c.alpha, c.seed, c.reps, c.tail)] = c

    def get(self, test, n, alpha, reps, seed, threads=1):
        """``{tail: CriticalValueSet}``, calibrating and storing on a miss."""
        comp = get_competitor(test)
        tails = ("upper",) if comp.tail == "upper" else ("lower", "upper")
        keys = [(comp.name, n, alpha, seed, reps, t) for t in tails]
        if not all(k in self._items for k in keys):
            for c in calibrate_critical_values(comp.name, [n], [alpha], reps, seed, threads):
                self._items[(c.test, c.n, c.alpha, c.seed, c.reps, c.tail)] = c
            self.save()
        return {k[-1]: self._items[k] for k in keys}

    def save(self):
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            critical_values_to_csv(sorted(self._items.values(),
                                          key=lambda c: (c.test, c.n, c.alpha, c.tail)),
                                   self.path)


def reject(test, statistic, cvs: dict):
    """Rejection decision(s) given ``{tail: CriticalValueSet}``; NaN statistics never reject."""
    stat = np.asarray(statistic, dtype=float)
    r = stat > cvs["upper"].value
    if "lower" in cvs:
        r = r | (stat < cvs["lower"].value)
    return r
