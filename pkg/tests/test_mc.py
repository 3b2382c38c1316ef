import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delegation_lab import mc


def _uniform_draw(rng, k):
    return rng.random(k)


def test_generator_is_reproducible_and_keyed():
    a = mc.generator(7, 0, 0, 3).random(5)
    assert np.array_equal(a, mc.generator(7, 0, 0, 3).random(5))
    assert not np.array_equal(a, mc.generator(7, 0, 0, 4).random(5))
    assert not np.array_equal(a, mc.generator(8, 0, 0, 3).random(5))
    # auxiliary streams never coincide with trial chunks
    assert not np.array_equal(mc.aux_generator(7, 0, 3).random(5), a)


def test_run_trials_rejects_zero():
    with pytest.raises(ValueError):
        mc.run_trials(_uniform_draw, 0, seed=1)


def test_run_trials_checks_shape():
    with pytest.raises(ValueError):
        mc.run_trials(lambda rng, k: rng.random(k + 1), 10, seed=1)


@pytest.mark.parametrize("trials", [1, mc.CHUNK - 1, mc.CHUNK, mc.CHUNK + 1, 3 * mc.CHUNK + 17])
def test_thread_count_does_not_change_results(monkeypatch, trials):
    monkeypatch.setenv(mc.THREADS_ENV, "1")
    one = mc.run_trials(_uniform_draw, trials, seed=11, stream=2)
    monkeypatch.setenv(mc.THREADS_ENV, "4")
    four = mc.run_trials(_uniform_draw, trials, seed=11, stream=2)
    assert one == four
    assert one.trials == trials


def test_chunks_are_prefix_stable():
    # the first chunk is the same draw whatever the total trial count
    full = []
    mc.run_trials(lambda rng, k: full.append(rng.random(k)) or full[-1], mc.CHUNK + 5, seed=3)
    part = []
    mc.run_trials(lambda rng, k: part.append(rng.random(k)) or part[-1], mc.CHUNK, seed=3)
    assert np.array_equal(full[0], part[0])


def test_uniform_mean_within_band():
    est = mc.run_trials(_uniform_draw, 100_000, seed=42)
    assert abs(est.value - 0.5) <= 4 * est.stderr
    assert est.stderr == pytest.approx(math.sqrt(1 / 12 / 100_000), rel=0.02)
    assert not est.exact and mc.Estimate(1.0).exact


@settings(max_examples=50, deadline=None)
@given(vals=st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
def test_mean_stderr_matches_numpy(vals):
    a = np.array(vals)
    m, se = mc.mean_stderr(a)
    assert m == pytest.approx(a.mean(), abs=1e-6)
    assert se == pytest.approx(a.std(ddof=1) / math.sqrt(len(a)), rel=1e-6, abs=1e-6)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv(mc.THREADS_ENV, "3")
    assert mc.worker_count() == 3
    monkeypatch.setenv(mc.THREADS_ENV, "0")
    assert mc.worker_count() >= 1
