"""Detection boundary, mixture calibration, p-values, and samplers."""

import math

import numpy as np
import pytest
from scipy import stats as sps

from sparsemix import (
    DomainError,
    MixtureSpec,
    NonFinite,
    OutOfRange,
    RandomStream,
    SampleTooSmall,
    SparsityParams,
    mixture_from,
    pvalue,
    r_of_beta,
    rho_star,
    sample_alternative,
    sample_null,
    stream_id_for,
)

REL = 1e-12


# ---------------------------------------------------------------------------
# detection boundary

def test_rho_star_frozen_values():
    assert rho_star(0.6) == pytest.approx(0.1, rel=REL)
    assert rho_star(0.75) == pytest.approx(0.25, rel=REL)
    assert rho_star(0.9) == pytest.approx(0.4675444679663241, rel=REL)
    assert rho_star(1.0) == pytest.approx(1.0, rel=REL)


def test_rho_star_continuous_at_branch_point():
    lo = rho_star(0.75 - 1e-9)
    hi = rho_star(0.75 + 1e-9)
    assert abs(hi - lo) < 1e-8


def test_rho_star_strictly_increasing():
    grid = np.linspace(0.5 + 1e-6, 1.0, 200)
    vals = [rho_star(b) for b in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("beta", [0.5, 0.3, 1.0 + 1e-9, -1.0])
def test_rho_star_domain(beta):
    with pytest.raises(DomainError):
        rho_star(beta)


def test_r_of_beta_sits_above_boundary():
    assert r_of_beta(0.6) == pytest.approx(0.22, rel=REL)
    assert r_of_beta(0.75) == pytest.approx(0.4, rel=REL)
    assert r_of_beta(1.0) == pytest.approx(1.3, rel=REL)
    for beta in np.linspace(0.55, 1.0, 10):
        assert r_of_beta(beta) > rho_star(beta)


# ---------------------------------------------------------------------------
# mixture calibration

def test_mixture_from_frozen_values():
    spec = mixture_from(10_000, 0.75)
    assert spec.eps == pytest.approx(1e-3, rel=REL)
    assert spec.mu == pytest.approx(2.7144561697660447, rel=REL)
    dense = mixture_from(1_000_000, 1.0)
    assert dense.eps == pytest.approx(1e-6, rel=REL)
    assert dense.mu == pytest.approx(5.993356943375483, rel=REL)


def test_mixture_from_r_override():
    spec = mixture_from(100, 0.8, r=0.5)
    assert spec.mu == pytest.approx(math.sqrt(math.log(100)), rel=REL)


def test_sparsity_params_validation():
    SparsityParams(beta=0.8, r=0.1, n=10)
    with pytest.raises(DomainError):
        SparsityParams(beta=0.5, r=0.1, n=10)
    with pytest.raises(DomainError):
        SparsityParams(beta=0.8, r=0.0, n=10)
    with pytest.raises(SampleTooSmall):
        SparsityParams(beta=0.8, r=0.1, n=1)


def test_mixture_spec_validation():
    MixtureSpec(n=10, eps=0.0, mu=0.0)  # degenerate null is allowed
    with pytest.raises(OutOfRange):
        MixtureSpec(n=10, eps=1.0, mu=1.0)
    with pytest.raises(OutOfRange):
        MixtureSpec(n=10, eps=-0.1, mu=1.0)
    with pytest.raises(OutOfRange):
        MixtureSpec(n=10, eps=0.1, mu=-1.0)
    with pytest.raises(NonFinite):
        MixtureSpec(n=10, eps=float("nan"), mu=1.0)
    with pytest.raises(SampleTooSmall):
        MixtureSpec(n=1, eps=0.1, mu=1.0)


# ---------------------------------------------------------------------------
# p-values

def test_pvalue_frozen_values():
    assert pvalue(1.644854) == pytest.approx(0.04999996152541305, rel=REL)
    assert pvalue(6.0) == pytest.approx(9.865876450376981e-10, rel=REL)
    assert pvalue(-2.5) == pytest.approx(0.9937903346742239, rel=REL)
    assert pvalue(0.0) == 0.5


def test_pvalue_symmetry_and_monotonicity():
    x = np.linspace(-6, 6, 121)
    p = pvalue(x)
    np.testing.assert_allclose(p + pvalue(-x), 1.0, rtol=0, atol=1e-12)
    assert np.all(np.diff(p) < 0.0)


def test_pvalue_shapes_and_validation():
    assert isinstance(pvalue(1.0), float)
    arr = pvalue(np.zeros((3, 2)))
    assert arr.shape == (3, 2)
    with pytest.raises(NonFinite):
        pvalue(float("inf"))
    with pytest.raises(NonFinite):
        pvalue(np.array([0.0, float("nan")]))


# ---------------------------------------------------------------------------
# null sampler

def _stream(seed, idx, sub=0, domain=0):
    return RandomStream(seed, stream_id_for(domain, sub, idx))


def test_sample_null_deterministic():
    a = sample_null(50, _stream(9, 3))
    b = sample_null(50, _stream(9, 3))
    assert np.array_equal(a.values, b.values)
    c = sample_null(50, _stream(9, 4))
    assert not np.array_equal(a.values, c.values)


def test_sample_null_uniformity():
    # pool 100 streams of 1000 draws and check the empirical CDF
    pooled = np.concatenate(
        [sample_null(1000, _stream(21, j)).values for j in range(100)]
    )
    d = sps.kstest(pooled, "uniform").statistic
    assert d < 0.006
    assert abs(pooled.mean() - 0.5) < 1e-3


def test_sample_null_mean_large_sample():
    total, count = 0.0, 0
    for j in range(10):
        v = sample_null(100_000, _stream(33, j)).values
        total += v.sum()
        count += v.size
    assert abs(total / count - 0.5) < 1e-3


def test_sample_null_normal_path_agrees_in_law():
    direct = sample_null(2000, _stream(4, 0))
    via_z = sample_null(2000, _stream(4, 0), normal_path=True)
    # same uniforms, different transform: not identical but same distribution
    assert not np.array_equal(direct.values, via_z.values)
    d = sps.ks_2samp(direct.values, via_z.values)
    assert d.pvalue > 0.01


# ---------------------------------------------------------------------------
# alternative sampler

def test_sample_alternative_deterministic():
    spec = mixture_from(200, 0.7)
    a = sample_alternative(spec, _stream(5, 1, domain=1))
    b = sample_alternative(spec, _stream(5, 1, domain=1))
    assert np.array_equal(a.values, b.values)


def test_sample_alternative_eps_zero_matches_null_law():
    spec = MixtureSpec(n=5000, eps=0.0, mu=3.0)
    alt = sample_alternative(spec, _stream(6, 0, domain=1))
    nul = sample_null(5000, _stream(6, 1))
    d = sps.ks_2samp(alt.values, nul.values)
    assert d.pvalue > 0.01


def test_sample_alternative_shift_count_is_binomial():
    # white box: the first n uniforms select the shifted component
    n, beta = 10_000, 0.75
    spec = mixture_from(n, beta)
    counts = []
    for j in range(1000):
        u = _stream(17, j, domain=1).generator().random(2 * n)
        counts.append(int((u[:n] < spec.eps).sum()))
    mean = np.mean(counts)
    assert abs(mean - 10.0) <= 1.0
    # and the sampler consumes exactly those uniforms: spiked sample has
    # more small p-values than the matched null
    alt = sample_alternative(mixture_from(n, 0.6), _stream(17, 0, domain=1))
    nul = sample_null(n, _stream(17, 0))
    assert (alt.values < 0.01).sum() > (nul.values < 0.01).sum()


def test_sample_alternative_shifts_lower_tail():
    spec = MixtureSpec(n=2000, eps=0.05, mu=4.0)
    alt = sample_alternative(spec, _stream(8, 2, domain=1))
    # about 5% of p-values should be pushed near zero
    frac_tiny = float((alt.values < 1e-3).mean())
    assert 0.02 < frac_tiny < 0.09
