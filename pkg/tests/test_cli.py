import json
import subprocess
import sys

import numpy as np
import pytest
from scipy.optimize import brentq

from pearsonq.cli import main
from pearsonq.estimators import estimate
from pearsonq.moments import Case, Sample, central_moments
from pearsonq.testing import normality_statistic
from pearsonq.estimators import estimate_continuous


def write_col(path, values, header="x"):
    path.write_text(header + "\n" + "\n".join(repr(float(v)) for v in values) + "\n")
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def q_of(x):
    ms = central_moments(Sample(np.asarray(x), Case.CONTINUOUS), 4)
    qp = estimate_continuous(ms)
    return float(normality_statistic(len(x), qp.delta, qp.beta, ms[2]))


def test_estimate_discrete_example(tmp_path, capsys):
    f = write_col(tmp_path / "d.csv", [-1, 0, 1])
    code, out, _ = run(capsys, "estimate", "--input", str(f), "--case", "discrete", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["delta"] == pytest.approx(-0.5, abs=1e-12)
    assert rec["beta"] == pytest.approx(-0.5, abs=1e-12)
    assert rec["gamma"] == pytest.approx(1.0, abs=1e-12)


def test_estimate_json_round_trip(tmp_path, capsys, rng):
    x = rng.gamma(3.0, size=400)
    f = write_col(tmp_path / "g.csv", x)
    code, out, _ = run(capsys, "estimate", "--input", str(f), "--format", "json", "--with-se")
    assert code == 0
    rec = json.loads(out)
    qp = estimate(central_moments(Sample(np.loadtxt(f, skiprows=1), Case.CONTINUOUS), 4),
                  Case.CONTINUOUS)
    assert (rec["delta"], rec["beta"], rec["gamma"]) == (qp.delta, qp.beta, qp.gamma)
    assert set(rec["se"]) == {"mean", "delta", "beta", "gamma"}
    assert all(v > 0 for v in rec["se"].values())


@pytest.mark.parametrize("fmt", ["csv", "text"])
def test_estimate_other_formats(tmp_path, capsys, rng, fmt):
    f = write_col(tmp_path / "n.csv", rng.normal(size=50))
    code, out, _ = run(capsys, "estimate", "--input", str(f), "--format", fmt)
    assert code == 0 and "delta" in out and "theta" in out


def test_poisson_two_values_exit_3(tmp_path, capsys):
    f = write_col(tmp_path / "p.csv", [0, 1] * 20)
    code, _, err = run(capsys, "test", "--which", "poisson", "--input", str(f))
    assert code == 3
    assert err.startswith("pearsonq: error: theta_degenerate:")


def test_small_sample_rejects_at_table_value(tmp_path, capsys):
    z = np.random.default_rng(50).normal(size=50)
    c = brentq(lambda c: q_of(z + c * z ** 2) - 9.0, 0.0, 1.0)
    x = z + c * z ** 2
    assert q_of(x) == pytest.approx(9.0, abs=1e-9)
    f = write_col(tmp_path / "s.csv", x)
    code, out, _ = run(capsys, "test", "--which", "normality", "--input", str(f), "--alpha", "0.05",
                       "--small-sample", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["critical_value"] == 8.36 and rec["reject"] is True
    assert rec["reference"] == "empirical_table"


@pytest.mark.parametrize("which", ["normality", "delta-zero", "symmetry"])
def test_test_command_continuous(tmp_path, capsys, rng, which):
    f = write_col(tmp_path / "n.csv", rng.normal(size=300))
    code, out, _ = run(capsys, "test", "--which", which, "--input", str(f), "--format", "json")
    assert code == 0 and json.loads(out)["test"] == which


def test_usage_errors(tmp_path, capsys):
    f = write_col(tmp_path / "n.csv", np.arange(20.0))
    with pytest.raises(SystemExit) as e:
        main(["estimate"])
    assert e.value.code == 2
    code, _, err = run(capsys, "test", "--which", "delta-zero", "--input", str(f), "--small-sample")
    assert code == 2 and "usage" in err
    code, _, err = run(capsys, "test", "--which", "normality", "--input", str(f), "--alpha", "0.07",
                       "--small-sample")
    assert code == 2 and "unsupported_alpha" in err
    code, _, err = run(capsys, "verify", "--family", "cauchy")
    assert code == 2 and "invalid_spec" in err
    code, _, _ = run(capsys, "estimate", "--input", str(tmp_path / "missing.csv"))
    assert code == 3


@pytest.mark.parametrize("family", ["poisson:lam=4", "binomial:N=10,p=0.3", "beta:a=5,b=5", "normal"])
def test_verify(capsys, family):
    code, out, _ = run(capsys, "verify", "--family", family)
    assert code == 0 and "status    ok" in out


def test_calibrate_and_seed_env(capsys, monkeypatch):
    args = ["calibrate", "--test", "ks", "--n-list", "20", "--alpha-list", "0.05,0.1",
            "--reps", "10000"]
    code, explicit, _ = run(capsys, *args, "--seed", "17")
    assert code == 0
    monkeypatch.setenv("PEARSONQ_SEED", "17")
    _, from_env, _ = run(capsys, *args)
    assert explicit == from_env
    assert explicit.splitlines()[0] == "test,n,alpha,tail,value,provenance,seed,reps"
    assert len(explicit.splitlines()) == 3
    monkeypatch.setenv("PEARSONQ_SEED", "abc")
    code, _, err = run(capsys, *args)
    assert code == 2


def test_calibrate_rejects_few_reps(capsys):
    code, _, _ = run(capsys, "calibrate", "--test", "ad", "--n-list", "20", "--reps", "100")
    assert code == 2


def test_percentiles_command(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, _, _ = run(capsys, "percentiles", "--n-list", "10,20", "--reps", "2000", "--seed", "1",
                     "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# test=normality provenance=recalibrated")
    assert lines[1] == "n,p90,p95,p975,p99"
    assert [l.split(",")[0] for l in lines[2:]] == ["10", "20", "inf"]


def test_simulate_threads_byte_identical(tmp_path):
    ini = tmp_path / "e.ini"
    ini.write_text("[experiment]\nfamily = beta:a=2,b=3\nsizes = 25, 80\nreps = 1300\nseed = 8\n"
                   "tests = normality, symmetry, ad, d\noutputs = estimator_table, size_power\n")
    for t in ("1", "8"):
        r = subprocess.run([sys.executable, "-m", "pearsonq", "simulate", "--config", str(ini),
                            "--threads", t, "--out", str(tmp_path / t)], capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
    for name in ("estimator_table.csv", "size_power.csv"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "8" / name).read_bytes()
    man = json.loads((tmp_path / "8" / "manifest.json").read_text())
    assert man["threads"] == 8 and man["config"]["seed"] == 8


def test_console_script_version():
    r = subprocess.run([sys.executable, "-m", "pearsonq", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("pearsonq ")
