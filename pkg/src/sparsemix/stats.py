"""Goodness-of-fit statistics on sorted p-values.

Implements the higher-criticism statistic HC*, the one-sided Berk-Jones
statistic BJ+, and the average likelihood ratio ALR (returned in the log
domain).  All three scan the lower half of the order statistics
p_(1) <= ... <= p_(m), m = floor(n/2).

The scalar operations are one-row wrappers over the batched kernels used by
the Monte Carlo engine, so a scalar evaluation and the corresponding row of a
batch are bitwise identical.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Integral

import numpy as np
from scipy import special

from .errors import (
    EmptyOrSingleton,
    DomainError,
    NonFinite,
    OutOfRange,
    SampleTooSmall,
    UnsupportedStatistic,
)

# Clamp bounds for p-values: keeps logs and the HC denominator finite.  The
# upper bound is the largest double strictly below 1 (1 - 1e-300 rounds to 1).
P_MIN = 1e-300
P_MAX = float(np.nextafter(1.0, 0.0))


class StatisticKind(str, enum.Enum):
    HC = "hc"
    BJ = "bj"
    ALR = "alr"

    @classmethod
    def parse(cls, token: str) -> "StatisticKind":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise UnsupportedStatistic(
                f"unknown statistic {token!r}; expected one of hc, bj, alr"
            ) from None


def supported_kinds(n: int) -> tuple[StatisticKind, ...]:
    """Statistics computable at sample size n (ALR needs n >= 4)."""
    if n < 4:
        return (StatisticKind.HC, StatisticKind.BJ)
    return (StatisticKind.HC, StatisticKind.BJ, StatisticKind.ALR)


@dataclass(frozen=True)
class SortedPValues:
    """A validated, ascending, clamped p-value sample."""

    values: np.ndarray
    n: int
    m: int

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 1 or self.n != v.size:
            raise OutOfRange("values must be one-dimensional with n entries")
        if self.n < 2:
            raise EmptyOrSingleton(f"need at least 2 p-values, got {self.n}")
        if self.m != self.n // 2:
            raise OutOfRange(f"m must equal floor(n/2), got {self.m}")
        if not np.all(np.isfinite(v)):
            raise NonFinite("p-values must be finite")
        if v[0] < P_MIN or v[-1] > P_MAX:
            raise OutOfRange("p-values must lie in the clamped unit interval")
        if np.any(np.diff(v) < 0.0):
            raise OutOfRange("p-values must be sorted ascending")


@dataclass(frozen=True)
class StatisticResult:
    kind: StatisticKind
    value: float
    n: int


def prepare(raw) -> SortedPValues:
    """Validate, clamp to [P_MIN, P_MAX], and sort a raw p-value sample."""
    try:
        a = np.asarray(raw, dtype=float).ravel()
    except (TypeError, ValueError):
        raise NonFinite("sample contains non-numeric values") from None
    n = a.size
    if n < 2:
        raise EmptyOrSingleton(f"need at least 2 p-values, got {n}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("sample contains NaN or infinite values")
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise OutOfRange("p-values must lie in [0, 1]")
    v = np.sort(np.clip(a, P_MIN, P_MAX), kind="stable")
    return SortedPValues(values=v, n=n, m=n // 2)


def log_lr_term(n: int, i: int, p: float) -> float:
    """One-sided binomial log likelihood ratio at index i.

    log LR_{n,i} = [i log(i/(n p)) + (n-i) log((1 - i/n)/(1 - p))] 1{p < i/n},
    floored at zero.
    """
    if not isinstance(n, Integral) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    if not isinstance(i, Integral) or not 1 <= i <= n:
        raise DomainError(f"i must be an integer in [1, n], got {i!r}")
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie strictly inside (0, 1), got {p!r}")
    i = int(i)
    n = int(n)
    t = i / n
    if not p < t:
        return 0.0
    first = i * math.log(i / (n * p))
    # at i = n the binomial mass puts nothing on the complement: the second
    # term vanishes rather than producing 0 * log(0)
    second = 0.0 if i == n else (n - i) * (math.log1p(-t) - math.log1p(-p))
    return max(first + second, 0.0)


def _alr_log_weights(n: int) -> np.ndarray:
    """log of the ALR mixing weights: w_1 = 1/2, w_i = 1/(2 i log(n/3))."""
    m = n // 2
    i = np.arange(1, m + 1, dtype=float)
    logw = -np.log(2.0 * i * np.log(n / 3.0))
    logw[0] = -math.log(2.0)
    return logw


def _log_lr_rows(pm: np.ndarray, n: int, t: np.ndarray) -> np.ndarray:
    """log LR_{n,i} for each row of sorted p-values, i = 1..m."""
    i = t * n
    ell = i * np.log(i / (n * pm)) + (n - i) * (np.log1p(-t) - np.log1p(-pm))
    ell = np.where(pm < t, ell, 0.0)
    np.fmax(ell, 0.0, out=ell)
    return ell


def _row_stats(
    p: np.ndarray, n: int, kinds: tuple[StatisticKind, ...]
) -> dict[StatisticKind, np.ndarray]:
    """Requested statistics for every row of a (batch, n) sorted matrix."""
    m = n // 2
    pm = p[:, :m]
    t = np.arange(1, m + 1, dtype=float) / n
    out: dict[StatisticKind, np.ndarray] = {}
    if StatisticKind.HC in kinds:
        out[StatisticKind.HC] = (
            math.sqrt(n) * (t - pm) / np.sqrt(pm * (1.0 - pm))
        ).max(axis=1)
    if StatisticKind.BJ in kinds or StatisticKind.ALR in kinds:
        ell = _log_lr_rows(pm, n, t)
        if StatisticKind.BJ in kinds:
            out[StatisticKind.BJ] = ell.max(axis=1)
        if StatisticKind.ALR in kinds:
            out[StatisticKind.ALR] = special.logsumexp(
                ell + _alr_log_weights(n), axis=1
            )
    return out


def _check_alr_size(n: int) -> None:
    if n < 4:
        raise SampleTooSmall(f"ALR needs n >= 4 (log(n/3) must be positive), got n={n}")


def hc_star(sample: SortedPValues) -> float:
    """Higher criticism: max over i <= n/2 of sqrt(n)(i/n - p_(i)) / sqrt(p_(i)(1-p_(i)))."""
    res = _row_stats(sample.values[None, :], sample.n, (StatisticKind.HC,))
    return float(res[StatisticKind.HC][0])


def bj_plus(sample: SortedPValues) -> float:
    """One-sided Berk-Jones: max over i <= n/2 of log LR_{n,i} at p_(i)."""
    res = _row_stats(sample.values[None, :], sample.n, (StatisticKind.BJ,))
    return float(res[StatisticKind.BJ][0])


def log_alr(sample: SortedPValues) -> float:
    """log of the average likelihood ratio over the lower half order statistics.

    ALR = (1/2) LR_{n,1} + (1/2) sum_{i=2}^{m} LR_{n,i} / (i log(n/3)),
    evaluated as a max-shifted log-sum-exp so large LR terms cannot overflow.
    """
    _check_alr_size(sample.n)
    res = _row_stats(sample.values[None, :], sample.n, (StatisticKind.ALR,))
    return float(res[StatisticKind.ALR][0])


def _log_alr_from_terms(n: int, terms: np.ndarray) -> float:
    """log ALR from precomputed log LR terms (i = 1..m); overflow-safety hook."""
    _check_alr_size(n)
    terms = np.asarray(terms, dtype=float)
    m = n // 2
    if terms.shape != (m,):
        raise OutOfRange(f"expected {m} log LR terms, got shape {terms.shape}")
    return float(special.logsumexp(terms + _alr_log_weights(n)))


def compute_statistic(sample: SortedPValues, kind: StatisticKind) -> StatisticResult:
    if kind is StatisticKind.HC:
        value = hc_star(sample)
    elif kind is StatisticKind.BJ:
        value = bj_plus(sample)
    elif kind is StatisticKind.ALR:
        value = log_alr(sample)
    else:
        raise UnsupportedStatistic(f"unknown statistic kind {kind!r}")
    return StatisticResult(kind=kind, value=value, n=sample.n)
