"""Batched Monte Carlo engine: scalar agreement, batching, caching."""

import numpy as np
import pytest

from sparsemix import (
    ConfigError,
    InsufficientReplicates,
    MixtureSpec,
    RandomStream,
    SampleTooSmall,
    StatisticKind,
    alternative_statistics,
    bj_plus,
    hc_star,
    log_alr,
    null_statistics,
    sample_alternative,
    sample_null,
    stream_id_for,
)
from sparsemix import engine
from sparsemix.rng import DOMAIN_NULL, DOMAIN_POWER


@pytest.fixture(autouse=True)
def _clean_cache():
    engine._NULL_CACHE.clear()
    yield
    engine._NULL_CACHE.clear()


def test_null_batch_matches_scalar_path_bitwise():
    n, reps, seed = 40, 25, 314
    got = null_statistics(n, reps, seed, threads=1)
    for j in range(reps):
        s = sample_null(n, RandomStream(seed, stream_id_for(DOMAIN_NULL, 0, j)))
        assert got[StatisticKind.HC][j] == hc_star(s)
        assert got[StatisticKind.BJ][j] == bj_plus(s)
        assert got[StatisticKind.ALR][j] == log_alr(s)


def test_alternative_batch_matches_scalar_path_bitwise():
    spec = MixtureSpec(n=30, eps=0.1, mu=2.0)
    reps, seed, sub = 20, 99, 3
    got = alternative_statistics(spec, reps, seed, sub=sub, threads=1)
    for j in range(reps):
        s = sample_alternative(
            spec, RandomStream(seed, stream_id_for(DOMAIN_POWER, sub, j))
        )
        assert got[StatisticKind.HC][j] == hc_star(s)
        assert got[StatisticKind.BJ][j] == bj_plus(s)
        assert got[StatisticKind.ALR][j] == log_alr(s)


def test_batch_size_does_not_change_results(monkeypatch):
    n, reps, seed = 24, 64, 7
    base = {k: v.copy() for k, v in null_statistics(n, reps, seed, threads=1).items()}
    engine._NULL_CACHE.clear()
    monkeypatch.setattr(engine, "ELEMENTS_PER_BATCH", 5 * n)
    small = null_statistics(n, reps, seed, threads=1)
    for k in base:
        assert np.array_equal(base[k], small[k])


def test_thread_count_does_not_change_results(monkeypatch):
    n, reps, seed = 24, 48, 8
    monkeypatch.setattr(engine, "ELEMENTS_PER_BATCH", 7 * n)  # force several tasks
    runs = []
    for threads in (1, 2, 0):
        engine._NULL_CACHE.clear()
        runs.append(null_statistics(n, reps, seed, threads=threads))
    for k in runs[0]:
        assert np.array_equal(runs[0][k], runs[1][k])
        assert np.array_equal(runs[0][k], runs[2][k])


def test_alternative_threads_and_batching_invariance(monkeypatch):
    spec = MixtureSpec(n=16, eps=0.2, mu=1.5)
    base = alternative_statistics(spec, 30, 5, sub=1, threads=1)
    monkeypatch.setattr(engine, "ELEMENTS_PER_BATCH", 4 * spec.n)
    redone = alternative_statistics(spec, 30, 5, sub=1, threads=2)
    for k in base:
        assert np.array_equal(base[k], redone[k])


def test_null_cache_shares_arrays():
    a = null_statistics(20, 10, 1, threads=1)
    b = null_statistics(20, 10, 1, threads=1)
    for k in a:
        assert a[k] is b[k]
    # subset requests reuse the cached arrays
    c = null_statistics(20, 10, 1, kinds=(StatisticKind.HC,), threads=1)
    assert set(c) == {StatisticKind.HC}
    assert c[StatisticKind.HC] is a[StatisticKind.HC]


def test_null_cache_is_keyed_and_bounded():
    null_statistics(20, 10, 1, threads=1)
    null_statistics(20, 10, 2, threads=1)
    assert len(engine._NULL_CACHE) == 2
    for seed in range(3, 3 + engine._NULL_CACHE_CAP):
        null_statistics(20, 10, seed, threads=1)
    assert len(engine._NULL_CACHE) == engine._NULL_CACHE_CAP


def test_small_n_skips_alr():
    got = null_statistics(3, 5, 0, threads=1)
    assert set(got) == {StatisticKind.HC, StatisticKind.BJ}


def test_request_validation():
    with pytest.raises(SampleTooSmall):
        null_statistics(1, 10, 0)
    with pytest.raises(InsufficientReplicates):
        null_statistics(10, 0, 0)
    with pytest.raises(SampleTooSmall):
        null_statistics(3, 5, 0, kinds=(StatisticKind.ALR,))
    with pytest.raises(ConfigError):
        null_statistics(10, 5, 0, threads=-1)
    with pytest.raises(InsufficientReplicates):
        alternative_statistics(MixtureSpec(n=10, eps=0.1, mu=1.0), 0, 0)


def test_resolve_threads():
    assert engine.resolve_threads(3) == 3
    assert engine.resolve_threads(0) >= 1
    with pytest.raises(ConfigError):
        engine.resolve_threads(-2)


def test_null_and_power_domains_do_not_collide():
    # same seed and index, different domains: different draws
    nul = null_statistics(12, 6, 42, threads=1)
    alt = alternative_statistics(MixtureSpec(n=12, eps=0.0, mu=0.0), 6, 42, threads=1)
    assert not np.array_equal(nul[StatisticKind.HC], alt[StatisticKind.HC])
