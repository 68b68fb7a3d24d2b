"""Sparse normal mixture model: calibration of (eps, mu), p-values, sampling.

The alternative places a fraction eps_n = n^-beta of observations at mean
mu_n = sqrt(2 r log n); the detection boundary rho*(beta) separates the
detectable from the undetectable (beta, r) region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, NonFinite, OutOfRange, SampleTooSmall
from .rng import RandomStream, normals_from_uniforms
from .stats import SortedPValues, prepare

_SQRT2 = math.sqrt(2.0)


def rho_star(beta: float) -> float:
    """Detection boundary: beta - 1/2 on (1/2, 3/4], (1 - sqrt(1-beta))^2 above."""
    beta = float(beta)
    if not 0.5 < beta <= 1.0:
        raise DomainError(f"beta must lie in (1/2, 1], got {beta!r}")
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def r_of_beta(beta: float) -> float:
    """Signal strength used by the power study: 20% above the boundary plus 0.1."""
    return 1.2 * rho_star(beta) + 0.1


@dataclass(frozen=True)
class SparsityParams:
    """(beta, r, n) parametrization of a sparse alternative."""

    beta: float
    r: float
    n: int

    def __post_init__(self) -> None:
        if not 0.5 < self.beta <= 1.0:
            raise DomainError(f"beta must lie in (1/2, 1], got {self.beta!r}")
        if not self.r > 0.0:
            raise DomainError(f"r must be positive, got {self.r!r}")
        if self.n < 2:
            raise SampleTooSmall(f"need n >= 2, got {self.n}")


@dataclass(frozen=True)
class MixtureSpec:
    """Concrete alternative at sample size n: fraction eps shifted by mu."""

    n: int
    eps: float
    mu: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise SampleTooSmall(f"need n >= 2, got {self.n}")
        if not math.isfinite(self.eps) or not math.isfinite(self.mu):
            raise NonFinite("eps and mu must be finite")
        # eps = 0 or mu = 0 degenerate to the null; allowed for testing
        if not 0.0 <= self.eps < 1.0:
            raise OutOfRange(f"eps must lie in [0, 1), got {self.eps!r}")
        if self.mu < 0.0:
            raise OutOfRange(f"mu must be nonnegative, got {self.mu!r}")


def mixture_from(n: int, beta: float, r: float | None = None) -> MixtureSpec:
    """MixtureSpec for (n, beta): eps = n^-beta, mu = sqrt(2 r log n).

    r defaults to r_of_beta(beta); passing r explicitly supports stress tests
    at other signal strengths.
    """
    params = SparsityParams(
        beta=float(beta), r=r_of_beta(beta) if r is None else float(r), n=n
    )
    eps = float(n) ** -params.beta
    mu = math.sqrt(2.0 * params.r * math.log(n))
    return MixtureSpec(n=n, eps=eps, mu=mu)


def pvalue(x):
    """Upper-tail standard normal p-value, 0.5 erfc(x / sqrt 2).

    Accepts a scalar or array; returns the same shape.
    """
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NonFinite("observations must be finite")
    p = 0.5 * special.erfc(a / _SQRT2)
    return float(p) if np.isscalar(x) or a.ndim == 0 else p


def sample_null(n: int, stream: RandomStream, *, normal_path: bool = False) -> SortedPValues:
    """One null sample of n p-values.

    Under the null the p-values are iid uniform, so the default path uses the
    stream's uniforms directly; normal_path=True instead draws z-scores by CDF
    inversion and converts them, consuming the same uniforms.
    """
    u = stream.generator().random(n)
    if normal_path:
        return prepare(0.5 * special.erfc(normals_from_uniforms(u) / _SQRT2))
    return prepare(u)


def sample_alternative(spec: MixtureSpec, stream: RandomStream) -> SortedPValues:
    """One sample from the mixture: first n uniforms pick the shifted
    components (u < eps), the next n invert to the normal draws."""
    n = spec.n
    u = stream.generator().random(2 * n)
    shifted = u[:n] < spec.eps
    z = normals_from_uniforms(u[n:])
    z += spec.mu * shifted
    return prepare(0.5 * special.erfc(z / _SQRT2))
