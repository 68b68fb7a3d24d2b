"""Critical values: Monte Carlo, closed-form asymptotics, and the ALR limit law.

Four routes to a critical value:

* empirical_cv      -- upper-alpha order statistic of a simulated null sample
* thresh_cv         -- slowly-growing threshold sqrt(2 loglog n) / loglog n
* evi_cv / evii_cv  -- two extreme-value refinements for HC and BJ
* alr_limit_cv      -- quantile of a sampled ALR limit law (variants cal1/cal2)

ALR critical values are kept in the log domain throughout, matching log_alr.
"""

from __future__ import annotations

import enum
import json
import math
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import engine
from .errors import (
    AlphaOutOfRange,
    ConfigError,
    DomainError,
    IncompatibleMethod,
    InsufficientReplicates,
    NegativeQ,
    NonFinite,
    OutOfRange,
    UnsupportedStatistic,
)
from .rng import (
    DOMAIN_CAL1,
    DOMAIN_CAL2,
    RandomStream,
    U_FLOOR,
    exponentials_from_uniforms,
    normals_from_uniforms,
    stream_id_for,
)
from .stats import StatisticKind

_LOG_4PI = math.log(4.0 * math.pi)


class CalibrationMethod(str, enum.Enum):
    EMPIRICAL = "empirical"
    THRESH = "thresh"
    EVI = "evi"
    EVII = "evii"
    CAL1 = "cal1"
    CAL2 = "cal2"

    @classmethod
    def parse(cls, token: str) -> "CalibrationMethod":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ConfigError(
                f"unknown calibration method {token!r}; expected one of "
                "empirical, thresh, evi, evii, cal1, cal2"
            ) from None


@dataclass(frozen=True)
class NullSample:
    """Sorted null replicates of one statistic at one sample size."""

    kind: StatisticKind
    n: int
    replicates: np.ndarray
    master_seed: int

    def __post_init__(self) -> None:
        r = self.replicates
        if r.ndim != 1 or r.size < 1:
            raise OutOfRange("replicates must be a nonempty vector")
        if not np.all(np.isfinite(r)):
            raise NonFinite("replicates must be finite")
        if np.any(np.diff(r) < 0.0):
            raise OutOfRange("replicates must be sorted ascending")

    @property
    def reps(self) -> int:
        return int(self.replicates.size)


def simulate_null_distribution(
    kind: StatisticKind,
    n: int,
    reps: int,
    master_seed: int,
    *,
    threads: int = 0,
) -> NullSample:
    """Simulate `reps` null replicates of the statistic and sort them."""
    if reps < 100:
        raise InsufficientReplicates(f"need reps >= 100, got {reps}")
    stats = engine.null_statistics(n, reps, master_seed, (kind,), threads=threads)
    return NullSample(
        kind=kind, n=n, replicates=np.sort(stats[kind]), master_seed=master_seed
    )


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def quantile_index(reps: int, alpha: float) -> int:
    """1-based index of the upper-alpha empirical quantile: ceil((1-alpha)(R+1)), capped at R.

    Uses exact rational arithmetic on alpha's decimal form; float rounding
    would put e.g. ceil(0.95 * 20) at 20 instead of 19.
    """
    _check_alpha(alpha)
    if reps < 1:
        raise InsufficientReplicates(f"need reps >= 1, got {reps}")
    k = math.ceil((1 - Fraction(str(alpha))) * (reps + 1))
    return min(k, reps)


def empirical_cv(sample: NullSample, alpha: float) -> float:
    """Upper-alpha critical value from a simulated null sample."""
    alpha = _check_alpha(alpha)
    reps = sample.reps
    if reps * alpha < 5.0:
        raise InsufficientReplicates(
            f"reps * alpha = {reps * alpha:.3g} < 5; tail too sparse to calibrate"
        )
    return float(sample.replicates[quantile_index(reps, alpha) - 1])


def _check_asymptotic_args(kind: StatisticKind, n: int) -> None:
    if kind is StatisticKind.ALR:
        raise UnsupportedStatistic(
            "asymptotic thresholds apply to hc and bj only; use cal1/cal2 for alr"
        )
    if kind not in (StatisticKind.HC, StatisticKind.BJ):
        raise UnsupportedStatistic(f"unknown statistic kind {kind!r}")
    if n < 16:
        raise DomainError(f"asymptotic formulas need n >= 16 (loglog n > 0), got {n}")


def thresh_cv(kind: StatisticKind, n: int) -> float:
    """Slowly-growing threshold: sqrt(2 loglog n) for HC, loglog n for BJ."""
    _check_asymptotic_args(kind, n)
    llog = math.log(math.log(n))
    if kind is StatisticKind.HC:
        return math.sqrt(2.0 * llog)
    return llog


def evi_cv(kind: StatisticKind, n: int, alpha: float) -> float:
    """First extreme-value approximation.

    q = loglog n + (1/2) logloglog n - (1/2) log 4pi - log(-log(1-alpha));
    BJ uses q directly, HC uses sqrt(2q).
    """
    _check_asymptotic_args(kind, n)
    alpha = _check_alpha(alpha)
    llog = math.log(math.log(n))
    q = llog + 0.5 * math.log(llog) - 0.5 * _LOG_4PI - math.log(-math.log1p(-alpha))
    if kind is StatisticKind.BJ:
        return q
    if q <= 0.0:
        raise NegativeQ(f"EVI quantile q = {q:.6g} <= 0 at n={n}, alpha={alpha}")
    return math.sqrt(2.0 * q)


def evii_cv(kind: StatisticKind, n: int, alpha: float) -> float:
    """Second extreme-value approximation.

    With c_n = 2 loglog n + (1/2) logloglog n - (1/2) log 4pi and
    b_n^2 = 2 loglog n, q = c_n^2 / (2 b_n^2) - log(-log(1-alpha)).
    """
    _check_asymptotic_args(kind, n)
    alpha = _check_alpha(alpha)
    llog = math.log(math.log(n))
    c = 2.0 * llog + 0.5 * math.log(llog) - 0.5 * _LOG_4PI
    b2 = 2.0 * llog
    q = c * c / (2.0 * b2) - math.log(-math.log1p(-alpha))
    if kind is StatisticKind.BJ:
        return q
    if q <= 0.0:
        raise NegativeQ(f"EVII quantile q = {q:.6g} <= 0 at n={n}, alpha={alpha}")
    return math.sqrt(2.0 * q)


@dataclass(frozen=True)
class CriticalValueTable:
    """Critical values of one statistic at one n, over a grid of alphas.

    entries is ((alpha, cv), ...) with alphas strictly increasing.  reps and
    master_seed record Monte Carlo provenance and are None for closed-form
    methods.
    """

    kind: StatisticKind
    n: int
    method: CalibrationMethod
    entries: tuple[tuple[float, float], ...]
    reps: int | None = None
    master_seed: int | None = None

    def __post_init__(self) -> None:
        if not self.entries:
            raise OutOfRange("table needs at least one (alpha, cv) entry")
        alphas = [a for a, _ in self.entries]
        cvs = [c for _, c in self.entries]
        for a in alphas:
            _check_alpha(a)
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise OutOfRange("alphas must be strictly increasing")
        if not all(math.isfinite(c) for c in cvs):
            raise NonFinite("critical values must be finite")
        if self.method is CalibrationMethod.THRESH:
            if any(c != cvs[0] for c in cvs):
                raise OutOfRange("thresh critical values are alpha-independent")
        # ties can occur in tiny Monte Carlo samples, so only require monotone
        elif any(b > a for a, b in zip(cvs, cvs[1:])):
            raise OutOfRange("critical values must be non-increasing in alpha")

    def cv(self, alpha: float) -> float:
        for a, c in self.entries:
            if a == alpha:
                return c
        raise DomainError(f"alpha {alpha!r} not in table")

    def to_json(self) -> str:
        payload = {
            "kind": self.kind.value,
            "n": self.n,
            "method": self.method.value,
            "R": self.reps,
            "master_seed": self.master_seed,
            "entries": [{"alpha": a, "cv": c} for a, c in self.entries],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CriticalValueTable":
        try:
            payload = json.loads(text)
            return cls(
                kind=StatisticKind.parse(payload["kind"]),
                n=int(payload["n"]),
                method=CalibrationMethod.parse(payload["method"]),
                entries=tuple((float(e["alpha"]), float(e["cv"])) for e in payload["entries"]),
                reps=None if payload["R"] is None else int(payload["R"]),
                master_seed=(
                    None if payload["master_seed"] is None else int(payload["master_seed"])
                ),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed critical value table: {exc}") from None


# --- ALR limit law -----------------------------------------------------------
#
# The limit of ALR_n is (1/2) (e^E / (e E))^{1(E<1)} + (1/2) W with E ~ Exp(1).
# cal1 takes W = exp((Z+)^2 / 2), Z standard normal; cal2 replaces W by the
# finite-n bridge functional
#     L_n = (1/log n) int_{1/n}^{1/2} (1/t) exp(B+(t)^2 / (2t(1-t))) dt
# evaluated by the trapezoid rule in u = log t on a log-spaced grid with exact
# Brownian-bridge transitions.


def _exp_factor(e: np.ndarray) -> np.ndarray:
    """(e^E / (e E))^{1(E < 1)} elementwise."""
    val = np.exp(e - 1.0) / np.fmax(e, U_FLOOR)
    return np.where(e < 1.0, val, 1.0)


def _cal1_rows(u: np.ndarray) -> np.ndarray:
    """cal1 limit draws from a (batch, 2) uniform matrix."""
    e = exponentials_from_uniforms(np.fmax(u[:, 0], U_FLOOR))
    z = normals_from_uniforms(u[:, 1])
    zp = np.fmax(z, 0.0)
    return 0.5 * _exp_factor(e) + 0.5 * np.exp(0.5 * zp * zp)


def sample_alr_limit_cal1(stream: RandomStream) -> float:
    """One draw from the cal1 limit law (raw scale, always >= 1)."""
    u = stream.generator().random(2)
    return float(_cal1_rows(u[None, :])[0])


@lru_cache(maxsize=16)
def _bridge_coeffs(n: int, grid_size: int):
    """Log-spaced grid on [1/n, 1/2] plus transition and trapezoid weights.

    Returns (t, c, w, denom): grid points, cumsum coefficients for the
    telescoped bridge transitions, trapezoid weights in u = log t, and the
    variance scale 2 t (1 - t).
    """
    u = np.linspace(math.log(1.0 / n), math.log(0.5), grid_size + 1)
    t = np.exp(u)
    t[0] = 1.0 / n
    t[-1] = 0.5
    c = np.empty(grid_size + 1)
    c[0] = math.sqrt(t[0] / (1.0 - t[0]))
    c[1:] = np.sqrt(np.diff(t) / ((1.0 - t[1:]) * (1.0 - t[:-1])))
    du = np.diff(u)
    w = np.zeros(grid_size + 1)
    w[:-1] += 0.5 * du
    w[1:] += 0.5 * du
    denom = 2.0 * t * (1.0 - t)
    return t, c, w, denom


def _check_bridge_args(n: int, grid_size: int) -> None:
    if n < 16:
        raise DomainError(f"bridge functional needs n >= 16, got {n}")
    if grid_size < 256:
        raise DomainError(f"grid_size must be >= 256, got {grid_size}")


def _bridge_rows(n: int, grid_size: int, u: np.ndarray) -> np.ndarray:
    """Brownian bridge values on the grid for each uniform row.

    Writing Y_j = B(t_j) / (1 - t_j), the exact conditional transitions
    collapse to Y_j = Y_{j-1} + c_j Z_j, so each path is one cumulative sum.
    """
    t, c, _, _ = _bridge_coeffs(n, grid_size)
    z = normals_from_uniforms(u)
    return (1.0 - t) * np.cumsum(z * c, axis=1)


def _ln_rows(n: int, grid_size: int, u: np.ndarray) -> np.ndarray:
    """L_n draws from a (batch, grid_size + 1) uniform matrix."""
    t, _, w, denom = _bridge_coeffs(n, grid_size)
    b = _bridge_rows(n, grid_size, u)
    np.fmax(b, 0.0, out=b)
    integrand = np.exp(b * b / denom)
    return np.sum(integrand * w, axis=1) / math.log(n)


@dataclass(frozen=True)
class BridgePath:
    """A Brownian bridge sampled on a log-spaced grid over [1/n, 1/2]."""

    n: int
    t_grid: np.ndarray
    b_values: np.ndarray

    def __post_init__(self) -> None:
        if self.t_grid.ndim != 1 or self.t_grid.shape != self.b_values.shape:
            raise OutOfRange("t_grid and b_values must be vectors of equal length")
        if self.t_grid.size < 2:
            raise OutOfRange("bridge path needs at least two grid points")
        if not (np.all(np.diff(self.t_grid) > 0.0) and 0.0 < self.t_grid[0]):
            raise OutOfRange("t_grid must be strictly increasing and positive")
        if self.t_grid[-1] > 0.5:
            raise OutOfRange("t_grid must end at 1/2")
        if not np.all(np.isfinite(self.b_values)):
            raise NonFinite("bridge values must be finite")


def sample_bridge_path(n: int, grid_size: int, stream: RandomStream) -> BridgePath:
    """One bridge path on the (n, grid_size) grid."""
    _check_bridge_args(n, grid_size)
    t, _, _, _ = _bridge_coeffs(n, grid_size)
    u = stream.generator().random(grid_size + 1)
    b = _bridge_rows(n, grid_size, u[None, :])[0]
    return BridgePath(n=n, t_grid=t.copy(), b_values=b)


def ln_functional(path: BridgePath) -> float:
    """Trapezoid value of L_n for an explicit bridge path.

    For the zero path the integrand is identically one and the value
    telescopes to log(n/2) / log n.
    """
    u = np.log(path.t_grid)
    b = np.fmax(path.b_values, 0.0)
    integrand = np.exp(b * b / (2.0 * path.t_grid * (1.0 - path.t_grid)))
    return float(np.trapezoid(integrand, u) / math.log(path.n))


def sample_ln(n: int, grid_size: int, stream: RandomStream) -> float:
    """One draw of the bridge functional L_n (always >= log(n/2)/log n)."""
    _check_bridge_args(n, grid_size)
    u = stream.generator().random(grid_size + 1)
    return float(_ln_rows(n, grid_size, u[None, :])[0])


def sample_alr_limit_cal2(n: int, grid_size: int, stream: RandomStream) -> float:
    """One draw from the cal2 limit law: the exponential factor plus L_n/2.

    The stream's first uniform drives E, the remaining grid_size + 1 drive
    the bridge.
    """
    _check_bridge_args(n, grid_size)
    u = stream.generator().random(grid_size + 2)
    return float(_cal2_rows(n, grid_size, u[None, :])[0])


def _cal2_rows(n: int, grid_size: int, u: np.ndarray) -> np.ndarray:
    e = exponentials_from_uniforms(np.fmax(u[:, 0], U_FLOOR))
    ln = _ln_rows(n, grid_size, u[:, 1:])
    return 0.5 * _exp_factor(e) + 0.5 * ln


def _cal1_task(args) -> np.ndarray:
    master_seed, start, count = args
    u = np.empty((count, 2))
    for j in range(count):
        gen = RandomStream(master_seed, stream_id_for(DOMAIN_CAL1, 0, start + j)).generator()
        gen.random(out=u[j])
    return _cal1_rows(u)


def _cal2_task(args) -> np.ndarray:
    master_seed, start, count, n, grid_size = args
    u = np.empty((count, grid_size + 2))
    for j in range(count):
        gen = RandomStream(master_seed, stream_id_for(DOMAIN_CAL2, 0, start + j)).generator()
        gen.random(out=u[j])
    return _cal2_rows(n, grid_size, u)


_LIMIT_CACHE: OrderedDict[tuple, np.ndarray] = OrderedDict()
_LIMIT_CACHE_CAP = 4


def _limit_draws(
    variant: CalibrationMethod,
    reps: int,
    n_for_l: int,
    grid_size: int,
    master_seed: int,
    threads: int,
) -> np.ndarray:
    key = (
        variant.value,
        reps,
        n_for_l if variant is CalibrationMethod.CAL2 else 0,
        grid_size if variant is CalibrationMethod.CAL2 else 0,
        master_seed,
    )
    draws = _LIMIT_CACHE.get(key)
    if draws is None:
        if variant is CalibrationMethod.CAL1:
            per_batch = max(1, engine.ELEMENTS_PER_BATCH // 2)
            tasks = [(master_seed, s, c) for s, c in engine._ranges(reps, per_batch)]
            parts = engine.map_tasks(_cal1_task, tasks, threads)
        else:
            per_batch = max(1, engine.ELEMENTS_PER_BATCH // (grid_size + 2))
            tasks = [
                (master_seed, s, c, n_for_l, grid_size)
                for s, c in engine._ranges(reps, per_batch)
            ]
            parts = engine.map_tasks(_cal2_task, tasks, threads)
        draws = np.sort(np.concatenate(parts))
        _LIMIT_CACHE[key] = draws
        while len(_LIMIT_CACHE) > _LIMIT_CACHE_CAP:
            _LIMIT_CACHE.popitem(last=False)
    return draws


def alr_limit_cv(
    variant: CalibrationMethod,
    alpha: float,
    reps: int,
    master_seed: int,
    *,
    n_for_l: int = 100_000,
    grid_size: int = 4096,
    threads: int = 0,
) -> float:
    """Upper-alpha critical value for log ALR from the sampled limit law."""
    if variant not in (CalibrationMethod.CAL1, CalibrationMethod.CAL2):
        raise IncompatibleMethod(
            f"ALR limit calibration supports cal1/cal2, got {variant!r}"
        )
    alpha = _check_alpha(alpha)
    if reps < 10_000:
        raise InsufficientReplicates(f"limit-law calibration needs reps >= 10000, got {reps}")
    if reps * alpha < 5.0:
        raise InsufficientReplicates(
            f"reps * alpha = {reps * alpha:.3g} < 5; tail too sparse to calibrate"
        )
    if variant is CalibrationMethod.CAL2:
        if n_for_l < 16:
            raise DomainError(f"n_for_l must be >= 16, got {n_for_l}")
        if grid_size < 256:
            raise DomainError(f"grid_size must be >= 256, got {grid_size}")
    draws = _limit_draws(variant, reps, n_for_l, grid_size, master_seed, threads)
    raw = float(draws[quantile_index(reps, alpha) - 1])
    return math.log(raw)
