"""Command-line interface: ``pearsonq <command> [options]``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric error.
Errors go to stderr as ``pearsonq: error: <code>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .asymptotics import asymptotic_cov
from .competitors import COMPETITORS, calibrate_critical_values, critical_values_to_csv
from .distributions import (FamilySpec, true_q_params, verify_continuous_identity,
                            verify_discrete_identity)
from .errors import DataError, InvalidSpec, NumericError, PearsonQError, UnsupportedAlpha
from .estimators import estimate
from .moments import Case, assert_nondegenerate, central_moments, ingest_csv
from .simharness import ExperimentConfig, run_experiment, run_percentiles
from .testing import PROPOSED

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
SEED_ENV = "PEARSONQ_SEED"
VERIFY_TOL = {Case.DISCRETE: 1e-12, Case.CONTINUOUS: 1e-7}


class UsageError(PearsonQError):
    code = "usage"


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def build_parser():
    p = argparse.ArgumentParser(prog="pearsonq", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pearsonq {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    e = sub.add_parser("estimate", help="estimate delta, beta, gamma from a CSV column")
    e.add_argument("--input", required=True)
    e.add_argument("--column")
    e.add_argument("--case", choices=["continuous", "discrete"], default="continuous")
    e.add_argument("--with-se", action="store_true", help="add delta-method standard errors")
    e.add_argument("--format", choices=["json", "csv", "text"], default="text")

    t = sub.add_parser("test", help="run one of the proposed tests")
    t.add_argument("--which", required=True, choices=sorted(PROPOSED))
    t.add_argument("--input", required=True)
    t.add_argument("--column")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--small-sample", action="store_true",
                   help="normality only: use the tabulated small-sample percentiles")
    t.add_argument("--format", choices=["json", "text"], default="text")

    s = sub.add_parser("simulate", help="run a Monte Carlo experiment from an INI config")
    s.add_argument("--config", required=True)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", default="results")

    q = sub.add_parser("percentiles", help="simulate upper percentiles of a statistic")
    q.add_argument("--test", default="normality")
    q.add_argument("--n-list", type=_int_list, required=True)
    q.add_argument("--reps", type=int, default=100_000)
    q.add_argument("--seed", type=int)
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--out", help="CSV path (default: stdout)")

    c = sub.add_parser("calibrate", help="Monte Carlo critical values for a competitor test")
    c.add_argument("--test", required=True, choices=sorted(k for k in COMPETITORS if k != "bs"))
    c.add_argument("--n-list", type=_int_list, required=True)
    c.add_argument("--alpha-list", type=_float_list, default=[0.05])
    c.add_argument("--reps", type=int, default=10_000)
    c.add_argument("--seed", type=int)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out", help="CSV path (default: stdout)")

    v = sub.add_parser("verify", help="check the defining identity for a family")
    v.add_argument("--family", required=True, help='e.g. "beta:a=5,b=5"')
    v.add_argument("--j-max", type=int, help="discrete families: last support point")
    return p


def _emit(text, path=None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_estimate(a):
    case = Case.parse(a.case)
    s = ingest_csv(a.input, a.column, case)
    ms = central_moments(s, 8 if a.with_se else 4)
    assert_nondegenerate(ms, s)
    qp = estimate(ms, case)
    rec = {"case": case.value, "n": s.n, "mean": ms.mean, "delta": qp.delta, "beta": qp.beta,
           "gamma": qp.gamma, "theta": ms.theta,
           "moments": {f"m{k}": ms[k] for k in range(2, 5)}}
    if a.with_se:
        se = asymptotic_cov(ms, case).standard_errors(s.n)
        rec["se"] = dict(zip(("mean", "delta", "beta", "gamma"), (float(v) for v in se)))
    if a.format == "json":
        _emit(json.dumps(rec) + "\n")
        return
    flat = {k: v for k, v in rec.items() if not isinstance(v, dict)}
    flat.update(rec["moments"])
    flat.update({f"se_{k}": v for k, v in rec.get("se", {}).items()})
    if a.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(flat)
        w.writerow([repr(v) if isinstance(v, float) else v for v in flat.values()])
        _emit(buf.getvalue())
    else:
        _emit("".join(f"{k:>10}  {v:.10g}\n" if isinstance(v, float) else f"{k:>10}  {v}\n"
                      for k, v in flat.items()))


def cmd_test(a):
    if a.small_sample and a.which != "normality":
        raise UsageError("--small-sample applies to --which normality only")
    case = Case.DISCRETE if a.which == "poisson" else Case.CONTINUOUS
    s = ingest_csv(a.input, a.column, case)
    if a.which == "normality":
        out = PROPOSED["normality"](s, a.alpha, mode="small_sample" if a.small_sample else "asymptotic")
    else:
        out = PROPOSED[a.which](s, a.alpha)
    rec = out.to_dict()
    if a.format == "json":
        _emit(json.dumps(rec) + "\n")
    else:
        _emit("".join(f"{k:>15}  {v}\n" for k, v in rec.items()))


def cmd_simulate(a):
    if a.threads < 1:
        raise UsageError("--threads must be >= 1")
    cfg = ExperimentConfig.from_ini(a.config, default_seed=_default_seed())
    res = run_experiment(cfg, threads=a.threads)
    for p in res.write(a.out):
        print(p)


def _seed(a):
    return a.seed if a.seed is not None else _default_seed()


def cmd_percentiles(a):
    table = run_percentiles(a.test, a.n_list, a.reps, _seed(a), threads=a.threads)
    _emit(table.to_csv(), a.out)


def cmd_calibrate(a):
    cvs = calibrate_critical_values(a.test, a.n_list, a.alpha_list, a.reps, _seed(a),
                                    threads=a.threads)
    _emit(critical_values_to_csv(cvs), a.out)


def cmd_verify(a):
    spec = FamilySpec.parse(a.family)
    qp = true_q_params(spec)
    if spec.case is Case.DISCRETE:
        res = verify_discrete_identity(spec, qp, a.j_max)
    else:
        res = verify_continuous_identity(spec, qp)
    tol = VERIFY_TOL[spec.case]
    print(f"family    {spec}")
    print(f"case      {spec.case.value}")
    print(f"q         delta={qp.delta:.10g} beta={qp.beta:.10g} gamma={qp.gamma:.10g}")
    print(f"residual  {res:.3e}")
    print(f"status    {'ok' if res < tol else 'FAIL'} (tolerance {tol:g})")
    if not res < tol:
        raise NumericError(f"identity residual {res:.3e} exceeds {tol:g}")


COMMANDS = {"estimate": cmd_estimate, "test": cmd_test, "simulate": cmd_simulate,
            "percentiles": cmd_percentiles, "calibrate": cmd_calibrate, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (UsageError, InvalidSpec, UnsupportedAlpha) as exc:
        return _fail(EXIT_USAGE, exc.code, exc)
    except DataError as exc:
        return _fail(EXIT_DATA, exc.code, exc)
    except NumericError as exc:
        return _fail(EXIT_NUMERIC, exc.code, exc)
    except ValueError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    return EXIT_OK


def _fail(status, code, exc):
    print(f"pearsonq: error: {code}: {exc}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
