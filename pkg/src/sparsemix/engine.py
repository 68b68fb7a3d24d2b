"""Batched Monte Carlo evaluation of the statistics under null and alternative.

Replicate j of a run is a pure function of (master_seed, stream_id), so the
result vectors do not depend on batch size or worker count.  Null statistic
vectors are cached per (n, reps, master_seed) so size tables and power-curve
calibration at the same configuration share one simulation pass.
"""

from __future__ import annotations

import multiprocessing
import os
from collections import OrderedDict

import numpy as np
from scipy import special

from .errors import ConfigError, InsufficientReplicates, SampleTooSmall
from .mixture import MixtureSpec
from .rng import (
    DOMAIN_NULL,
    DOMAIN_POWER,
    RandomStream,
    normals_from_uniforms,
    stream_id_for,
)
from .stats import P_MAX, P_MIN, StatisticKind, _row_stats, supported_kinds

# Rough per-batch element budget; keeps temporaries ~100 MB at any n.
ELEMENTS_PER_BATCH = 4_000_000

_SQRT2 = np.sqrt(2.0)

_NULL_CACHE: OrderedDict[tuple[int, int, int], dict[StatisticKind, np.ndarray]]
_NULL_CACHE = OrderedDict()
_NULL_CACHE_CAP = 8


def resolve_threads(threads: int) -> int:
    """0 means all available cores; otherwise the explicit worker count."""
    if threads < 0:
        raise ConfigError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        return os.cpu_count() or 1
    return threads


def map_tasks(fn, tasks: list, threads: int) -> list:
    """Run fn over tasks, in order, optionally on a process pool."""
    workers = resolve_threads(threads)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    if "fork" in multiprocessing.get_all_start_methods():
        ctx = multiprocessing.get_context("fork")
    else:
        ctx = multiprocessing.get_context()
    with ctx.Pool(min(workers, len(tasks))) as pool:
        return pool.map(fn, tasks)


def _ranges(total: int, per_batch: int) -> list[tuple[int, int]]:
    return [(s, min(per_batch, total - s)) for s in range(0, total, per_batch)]


def _null_rows(n: int, master_seed: int, start: int, count: int) -> np.ndarray:
    """Sorted clamped p-value matrix for null replicates start..start+count-1."""
    m = np.empty((count, n))
    for j in range(count):
        gen = RandomStream(master_seed, stream_id_for(DOMAIN_NULL, 0, start + j)).generator()
        gen.random(out=m[j])
    np.clip(m, P_MIN, P_MAX, out=m)
    m.sort(axis=1)
    return m


def _alt_rows(
    n: int, eps: float, mu: float, master_seed: int, sub: int, start: int, count: int
) -> np.ndarray:
    """Sorted clamped p-value matrix for alternative replicates.

    Row layout matches mixture.sample_alternative: the first n uniforms pick
    the shifted components, the next n invert to normals.
    """
    u = np.empty((count, 2 * n))
    for j in range(count):
        gen = RandomStream(
            master_seed, stream_id_for(DOMAIN_POWER, sub, start + j)
        ).generator()
        gen.random(out=u[j])
    shifted = u[:, :n] < eps
    z = normals_from_uniforms(u[:, n:])
    z += mu * shifted
    p = 0.5 * special.erfc(z / _SQRT2)
    np.clip(p, P_MIN, P_MAX, out=p)
    p.sort(axis=1)
    return p


def _null_task(args) -> dict[StatisticKind, np.ndarray]:
    n, master_seed, start, count, kinds = args
    return _row_stats(_null_rows(n, master_seed, start, count), n, kinds)


def _alt_task(args) -> dict[StatisticKind, np.ndarray]:
    n, eps, mu, master_seed, sub, start, count, kinds = args
    return _row_stats(_alt_rows(n, eps, mu, master_seed, sub, start, count), n, kinds)


def _check_request(n: int, reps: int, kinds) -> tuple[StatisticKind, ...]:
    if n < 2:
        raise SampleTooSmall(f"need n >= 2, got {n}")
    if reps < 1:
        raise InsufficientReplicates(f"need at least one replicate, got {reps}")
    available = supported_kinds(n)
    if kinds is None:
        return available
    kinds = tuple(kinds)
    for k in kinds:
        if k not in available:
            raise SampleTooSmall(f"{k.value} needs n >= 4, got n={n}")
    return kinds


def null_statistics(
    n: int,
    reps: int,
    master_seed: int,
    kinds: tuple[StatisticKind, ...] | None = None,
    *,
    threads: int = 0,
) -> dict[StatisticKind, np.ndarray]:
    """Statistic vectors over `reps` null replicates, keyed by kind.

    Returned arrays are cached and shared; callers must not mutate them.
    """
    kinds = _check_request(n, reps, kinds)
    key = (n, reps, master_seed)
    cached = _NULL_CACHE.get(key)
    if cached is None:
        compute = supported_kinds(n)
        per_batch = max(1, ELEMENTS_PER_BATCH // n)
        tasks = [(n, master_seed, s, c, compute) for s, c in _ranges(reps, per_batch)]
        parts = map_tasks(_null_task, tasks, threads)
        cached = {k: np.concatenate([p[k] for p in parts]) for k in compute}
        _NULL_CACHE[key] = cached
        while len(_NULL_CACHE) > _NULL_CACHE_CAP:
            _NULL_CACHE.popitem(last=False)
    return {k: cached[k] for k in kinds}


def alternative_statistics(
    spec: MixtureSpec,
    reps: int,
    master_seed: int,
    *,
    sub: int = 0,
    kinds: tuple[StatisticKind, ...] | None = None,
    threads: int = 0,
) -> dict[StatisticKind, np.ndarray]:
    """Statistic vectors over `reps` replicates of the given mixture.

    `sub` partitions the stream space between alternatives run under one
    master seed (e.g. the index of a beta grid point).
    """
    kinds = _check_request(spec.n, reps, kinds)
    per_batch = max(1, ELEMENTS_PER_BATCH // (2 * spec.n))
    tasks = [
        (spec.n, spec.eps, spec.mu, master_seed, sub, s, c, kinds)
        for s, c in _ranges(reps, per_batch)
    ]
    parts = map_tasks(_alt_task, tasks, threads)
    return {k: np.concatenate([p[k] for p in parts]) for k in kinds}
