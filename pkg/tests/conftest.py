import functools
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Seed fixed before any acceptance run was looked at; never tuned.
ACCEPTANCE_SEED = 2024
THREADS = min(8, os.cpu_count() or 1)


@functools.lru_cache(maxsize=None)
def recalibrated_table(sizes, reps=100_000, seed=ACCEPTANCE_SEED):
    """Simulated q_n percentile table, shared between test modules."""
    from pearsonq.simharness import percentile_statistics, run_percentiles

    table = run_percentiles("normality", sizes, reps, seed, threads=THREADS)
    stats = {n: percentile_statistics("normality", n, reps, seed, threads=THREADS)
             for n in sizes}
    return table, stats


def bootstrap_quantile_se(x, probs, b=200, seed=0):
    rng = np.random.default_rng(seed)
    x = x[np.isfinite(x)]
    boots = np.empty((b, len(probs)))
    for k in range(b):
        boots[k] = np.quantile(x[rng.integers(0, x.size, x.size)], probs)
    return boots.std(axis=0, ddof=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Lines recorded by the acceptance tests, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
