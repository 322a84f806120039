"""Deterministic Monte Carlo engine.

Replication ``i`` at sample size ``n`` draws from
``substream(seed, "sim|<family>|n=<n>", i)``, so every test in a run sees
the same samples and results never depend on the worker count.  Work is
split into fixed chunks of replication indices; chunk results are
concatenated in index order before any reduction.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .competitors import COMPETITORS, CriticalValueCache, asymptotic_critical_value
from .distributions import FamilySpec, true_q_params
from .errors import DataError, InvalidSpec
from .estimators import estimate_rows
from .moments import Case, central_moments_rows
from .quantiles import chi2_upper, normal_upper
from .rng import draw_rows
from .testing import (LEVELS, PercentileTable, _level_index, _lookup_row,
                      delta_zero_statistic, normality_statistic, shipped_table,
                      poisson_statistic, symmetry_statistic)

CHUNK = 500
QUANTILE_METHOD = "linear"  # type-7
PROPOSED_TESTS = ("normality", "normality-small", "delta-zero", "symmetry", "poisson")
OUTPUTS = ("estimator_table", "percentiles", "size_power")
PERCENTILE_TESTS = ("normality",) + tuple(k for k, c in COMPETITORS.items() if c.tail == "upper")


def map_chunks(work, reps, chunk, threads=1):
    """``[work(start, stop) ...]`` over fixed chunks of ``range(reps)``, in order."""
    bounds = [(a, min(a + chunk, reps)) for a in range(0, reps, chunk)]
    if threads <= 1 or len(bounds) == 1:
        return [work(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda ab: work(*ab), bounds))


def _sim_label(spec, n):
    return f"sim|{spec}|n={n}"


# --- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    ``tests`` may name the proposed tests (``normality``, ``normality-small``
    for the tabulated small-sample version, ``delta-zero``, ``symmetry``,
    ``poisson``) and the competitors ``ks, bs, d, ad, cvm, za, zc, cm``.
    """

    spec: FamilySpec
    sizes: tuple
    reps: int
    seed: int
    tests: tuple = ()
    alpha: float = 0.05
    outputs: tuple = ("estimator_table",)
    name: str = "experiment"
    calibration_reps: int = 10_000
    poisson_matrix: str = "corrected"
    cache: str | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise InvalidSpec(f"reps must be >= 1, got {self.reps}")
        if not self.sizes:
            raise InvalidSpec("sizes must be nonempty")
        if not 0 < self.alpha < 1:
            raise InvalidSpec(f"alpha must be in (0, 1), got {self.alpha}")
        for o in self.outputs:
            if o not in OUTPUTS:
                raise InvalidSpec(f"unknown output {o!r}; choose from {OUTPUTS}")
        for t in self.tests:
            if t not in PROPOSED_TESTS and t not in COMPETITORS:
                raise InvalidSpec(f"unknown test {t!r}")
        if self.poisson_matrix not in ("corrected", "printed"):
            raise InvalidSpec("poisson_matrix must be 'corrected' or 'printed'")
        if "size_power" in self.outputs and not self.tests:
            raise InvalidSpec("size_power output needs at least one test")
        if "percentiles" in self.outputs:
            bad = [t for t in self.tests if t not in PERCENTILE_TESTS]
            if bad or not self.tests:
                raise InvalidSpec(f"percentiles output needs tests from {PERCENTILE_TESTS}, got {bad}")

    @classmethod
    def from_ini(cls, path_or_text, default_seed=0):
        """Read the ``[experiment]`` section of an INI file (or INI text)."""
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        p = Path(path_or_text) if "\n" not in str(path_or_text) else None
        if p is not None:
            if not p.exists():
                raise InvalidSpec(f"config file not found: {p}")
            cp.read(p, encoding="utf-8")
        else:
            cp.read_string(path_or_text)
        if "experiment" not in cp:
            raise InvalidSpec("config needs an [experiment] section")
        sec = cp["experiment"]

        def ints(key):
            return tuple(int(v) for v in _split(sec.get(key, "")))

        try:
            return cls(
                spec=FamilySpec.parse(sec.get("family", "normal")),
                sizes=ints("sizes"),
                reps=sec.getint("reps", 10_000),
                seed=sec.getint("seed", default_seed),
                tests=tuple(_split(sec.get("tests", ""))),
                alpha=sec.getfloat("alpha", 0.05),
                outputs=tuple(_split(sec.get("outputs", "estimator_table"))),
                name=sec.get("name", "experiment"),
                calibration_reps=sec.getint("calibration_reps", 10_000),
                poisson_matrix=sec.get("poisson_matrix", "corrected"),
                cache=sec.get("cache", None),
            )
        except ValueError as exc:
            raise InvalidSpec(f"bad config value: {exc}") from exc

    def to_dict(self):
        return {
            "name": self.name, "family": str(self.spec), "sizes": list(self.sizes),
            "reps": self.reps, "seed": self.seed, "tests": list(self.tests),
            "alpha": self.alpha, "outputs": list(self.outputs),
            "calibration_reps": self.calibration_reps, "poisson_matrix": self.poisson_matrix,
        }


def _split(text):
    return [t.strip() for t in text.replace(";", ",").split(",") if t.strip()]


# --- results --------------------------------------------------------------------

@dataclass
class ExperimentResult:
    """Tables produced by a run.

    ``estimator_rows`` and ``size_power_rows`` are lists of flat dicts, one
    per sample size or per ``(size, test)`` cell.  Every cell satisfies
    ``reps == decided + no_decision``; ``singular`` counts the no-decision
    cases caused by a singular null covariance (the rest are samples whose
    moment estimators are undefined).
    """

    config: ExperimentConfig
    estimator_rows: list = field(default_factory=list)
    size_power_rows: list = field(default_factory=list)
    percentiles: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def estimator(self, n):
        return next(r for r in self.estimator_rows if r["n"] == n)

    def rate(self, n, test):
        return next(r for r in self.size_power_rows if r["n"] == n and r["test"] == test)

    def write(self, out_dir):
        """Write CSV tables and ``manifest.json``; returns the list of paths."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        if self.estimator_rows:
            paths.append(_write_rows(out / "estimator_table.csv", self.estimator_rows))
        if self.size_power_rows:
            paths.append(_write_rows(out / "size_power.csv", self.size_power_rows))
        for test, table in self.percentiles.items():
            p = out / f"percentiles_{test}.csv"
            table.to_csv(p)
            paths.append(p)
        manifest = dict(self.metadata)
        manifest["files"] = [p.name for p in paths]
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")
        return paths + [out / "manifest.json"]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def _write_rows(path, rows):
    path.write_text(rows_to_csv(rows), encoding="utf-8")
    return path


def _rate_cell(flags):
    """Summaries of a 0/1/NaN rejection array."""
    reps = flags.size
    decided = int(np.count_nonzero(~np.isnan(flags)))
    rej = int(np.nansum(flags))
    rate = rej / decided if decided else float("nan")
    se = math.sqrt(rate * (1 - rate) / decided) if decided else float("nan")
    return {"reps": reps, "decided": decided, "no_decision": reps - decided,
            "rejections": rej, "rate": rate, "se": se,
            "no_decision_rate": (reps - decided) / reps}


# --- per-chunk kernels -------------------------------------------------------------

def _flag(reject, ok):
    return np.where(ok, reject.astype(float), np.nan)


def _distinct_ok(x):
    return np.count_nonzero(np.diff(np.sort(x, axis=-1), axis=-1), axis=-1) >= 2


class _Kernel:
    """Everything computed from one chunk of replications at one size."""

    def __init__(self, cfg, n, crit):
        self.cfg, self.n, self.crit = cfg, n, crit
        self.case = cfg.spec.case
        self.need_est = "estimator_table" in cfg.outputs or any(
            t in PROPOSED_TESTS for t in cfg.tests)

    def __call__(self, start, stop):
        cfg, n = self.cfg, self.n
        x = draw_rows(cfg.spec, n, cfg.seed, _sim_label(cfg.spec, n), start, stop)
        res = {}
        mean, m = central_moments_rows(x, 6)
        delta, beta, gamma, ok = estimate_rows(m[2], m[3], m[4], self.case)
        if self.case is Case.DISCRETE:
            ok &= _distinct_ok(x)
            delta, beta, gamma = (np.where(ok, a, np.nan) for a in (delta, beta, gamma))
        res.update(delta=delta, beta=beta, gamma=gamma, ok=ok)
        zc = normal_upper(cfg.alpha / 2)
        if self.case is Case.CONTINUOUS:
            z = delta_zero_statistic(n, np.where(ok, delta, 0.0), m[2], m[3])
            res["delta-zero"] = _flag(np.abs(z) > zc, ok)
        for t in cfg.tests:
            if t == "delta-zero":
                continue
            if t in ("normality", "normality-small"):
                q = normality_statistic(n, np.where(ok, delta, 0.0), np.where(ok, beta, 0.0), m[2])
                r = q > self.crit[t] if t == "normality" else q >= self.crit[t]
                res[t] = _flag(r, ok)
            elif t == "symmetry":
                z = symmetry_statistic(n, m[2], m[3], m[4], m[6])
                res[t] = _flag(np.abs(np.nan_to_num(z)) > zc, ~np.isnan(z))
            elif t == "poisson":
                good = ok & (mean > 0)
                q, singular = poisson_statistic(
                    n, np.where(good, delta, 0.0), np.where(good, beta, 0.0), m[2],
                    np.where(good, mean, 1.0), printed=cfg.poisson_matrix == "printed")
                res["poisson:singular"] = good & singular
                good &= ~singular
                res[t] = _flag(np.nan_to_num(q) > self.crit[t], good)
            else:
                stat = COMPETITORS[t].statistic(x)
                cv = self.crit[t]
                r = stat > cv["upper"].value
                if "lower" in cv:
                    r |= stat < cv["lower"].value
                res[t] = _flag(r, np.isfinite(stat))
        return res


def _critical_values(cfg, n, cache, threads):
    crit, source = {}, {}
    for t in cfg.tests:
        if t == "normality":
            crit[t], source[t] = chi2_upper(cfg.alpha, 2), "chi2(2)"
        elif t == "normality-small":
            crit[t] = _lookup_row(shipped_table(), n)[_level_index(cfg.alpha)]
            source[t] = "table"
        elif t in ("delta-zero", "symmetry"):
            crit[t], source[t] = normal_upper(cfg.alpha / 2), "std_normal"
        elif t == "poisson":
            crit[t], source[t] = chi2_upper(cfg.alpha, 3), f"chi2(3);{cfg.poisson_matrix}"
        elif t == "bs":
            crit[t], source[t] = {"upper": asymptotic_critical_value("bs", n, cfg.alpha)}, "chi2(2)"
        else:
            crit[t] = cache.get(t, n, cfg.alpha, cfg.calibration_reps, cfg.seed, threads)
            source[t] = f"monte_carlo(seed={cfg.seed};reps={cfg.calibration_reps})"
    return crit, source


def _concat(parts):
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def _check_tests(cfg):
    case = cfg.spec.case
    for t in cfg.tests:
        if t == "poisson" and case is not Case.DISCRETE:
            raise InvalidSpec("the poisson test needs a discrete family")
        if t != "poisson" and case is not Case.CONTINUOUS:
            raise InvalidSpec(f"test {t!r} needs a continuous family")
    if "normality-small" in cfg.tests and min(cfg.sizes) < 10:
        raise DataError("tabulated percentiles start at n=10")
    if "d" in cfg.tests and min(cfg.sizes) < 10:
        raise DataError("the d test needs n >= 10")


def _estimator_row(n, data, truth, case):
    ok = data["ok"]
    row = {"n": n, "reps": ok.size, "decided": int(ok.sum()), "no_decision": int((~ok).sum())}
    for name, true in zip(("delta", "beta", "gamma"), truth):
        v = data[name][ok]
        k = v.size
        err2 = (v - true) ** 2
        row[f"true_{name}"] = float(true)
        row[f"mean_{name}"] = float(v.mean()) if k else math.nan
        row[f"mse_{name}"] = float(err2.mean()) if k else math.nan
        row[f"se_mean_{name}"] = float(v.std(ddof=1) / math.sqrt(k)) if k > 1 else math.nan
        row[f"se_mse_{name}"] = float(err2.std(ddof=1) / math.sqrt(k)) if k > 1 else math.nan
    if case is Case.CONTINUOUS:
        cell = _rate_cell(data["delta-zero"])
        row["p_delta"], row["se_p_delta"] = cell["rate"], cell["se"]
    return row


def _metadata(cfg, t0, threads):
    import scipy

    return {
        "config": cfg.to_dict(), "seed": cfg.seed, "reps": cfg.reps, "threads": threads,
        "wall_time_s": round(time.perf_counter() - t0, 3), "quantile_method": "type-7",
        "chunk": CHUNK,
        "versions": {"pearsonq": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
    }


def _run(cfg, threads, outputs):
    t0 = time.perf_counter()
    _check_tests(cfg)
    cache = CriticalValueCache(cfg.cache)
    result = ExperimentResult(cfg)
    truth = true_q_params(cfg.spec).as_tuple()
    for n in cfg.sizes:
        crit, source = _critical_values(cfg, n, cache, threads)
        data = _concat(map_chunks(_Kernel(cfg, n, crit), cfg.reps, CHUNK, threads))
        if "estimator_table" in outputs:
            result.estimator_rows.append(_estimator_row(n, data, truth, cfg.spec.case))
        if "size_power" in outputs:
            for t in cfg.tests:
                row = {"family": str(cfg.spec), "n": n, "test": t, "alpha": cfg.alpha}
                row.update(_rate_cell(data[t]))
                row["singular"] = int(data["poisson:singular"].sum()) if t == "poisson" else 0
                row["critical_source"] = source[t]
                result.size_power_rows.append(row)
    if "percentiles" in outputs:
        for t in cfg.tests:
            result.percentiles[t] = run_percentiles(t, cfg.sizes, cfg.reps, cfg.seed,
                                                    threads=threads, spec=cfg.spec)
    result.metadata = _metadata(cfg, t0, threads)
    return result


def run_estimator_table(cfg: ExperimentConfig, threads=1) -> ExperimentResult:
    """Mean, MSE and Monte Carlo SEs of the estimators, plus the ``delta = 0`` rejection rate."""
    return _run(cfg, threads, ("estimator_table",))


def run_size_power(cfg: ExperimentConfig, threads=1) -> ExperimentResult:
    """Rejection rate per ``(size, test)`` at level ``cfg.alpha``."""
    return _run(cfg, threads, ("size_power",))


def run_experiment(cfg: ExperimentConfig, threads=1) -> ExperimentResult:
    """All outputs listed in ``cfg.outputs``."""
    return _run(cfg, threads, cfg.outputs)


def percentile_statistics(test, n, reps, seed, threads=1, spec=None):
    """Simulated statistic values (NaN for degenerate replications)."""
    spec = FamilySpec.parse("normal") if spec is None else spec
    if test == "normality":
        def work(a, b):
            x = draw_rows(spec, n, seed, _sim_label(spec, n), a, b)
            _, m = central_moments_rows(x, 4)
            delta, beta, _, ok = estimate_rows(m[2], m[3], m[4], Case.CONTINUOUS)
            return np.where(ok, normality_statistic(n, delta, beta, m[2]), np.nan)
    elif test in PERCENTILE_TESTS:
        def work(a, b):
            return COMPETITORS[test].statistic(draw_rows(spec, n, seed, _sim_label(spec, n), a, b))
    else:
        raise InvalidSpec(f"percentiles need an upper-tailed statistic, not {test!r}")
    return np.concatenate(map_chunks(work, reps, CHUNK, threads))


def run_percentiles(test, n_list, reps, seed, threads=1, spec=None) -> PercentileTable:
    """Upper percentiles ``P0.90, P0.95, P0.975, P0.99`` per n (type-7 quantiles)."""
    probs = [1 - a for a in LEVELS]
    rows = {}
    for n in n_list:
        s = percentile_statistics(test, int(n), reps, seed, threads, spec)
        s = s[np.isfinite(s)]
        rows[int(n)] = tuple(float(v) for v in np.quantile(s, probs, method=QUANTILE_METHOD))
    asym = tuple(chi2_upper(a, 2) for a in LEVELS) if test in ("normality", "bs") else None
    return PercentileTable(test, rows, asym, f"recalibrated(seed={seed};reps={reps})")


__all__ = [
    "ExperimentConfig", "ExperimentResult", "map_chunks", "run_estimator_table",
    "run_size_power", "run_experiment", "run_percentiles", "percentile_statistics",
]
