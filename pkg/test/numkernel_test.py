'''Unit tests for the numerical kernels'''

import math

import numpy as np
from scipy import stats

import shrinkvar.numkernel as nk
from shrinkvar.core import DomainError, SeedSpec

import pytest

EULER_GAMMA = 0.5772156649015329


def test_special_functions():
    np.testing.assert_allclose(nk.log_gamma(0.5), 0.5 * math.log(math.pi),
                               rtol=1e-15)
    assert nk.log_gamma(1.0) == 0.0
    np.testing.assert_allclose(nk.digamma(1.0), -EULER_GAMMA, rtol=1e-15)
    np.testing.assert_allclose(nk.digamma(0.5),
                               -EULER_GAMMA - 2 * math.log(2.0), rtol=1e-15)
    np.testing.assert_allclose(nk.log_beta(2.0, 3.0), math.log(1 / 12.0),
                               rtol=1e-14)
    np.testing.assert_allclose(nk.digamma(np.array([1.0, 2.0])),
                               [-EULER_GAMMA, 1 - EULER_GAMMA], rtol=1e-15)


@pytest.mark.parametrize("func,args", [
    (nk.log_gamma, (0.0,)),
    (nk.log_gamma, (-1.5,)),
    (nk.digamma, (float('nan'),)),
    (nk.log_beta, (1.0, 0.0)),
])
def test_special_function_domain(func, args):
    with pytest.raises(DomainError):
        func(*args)


def test_poisson_truncate_zero_rate():
    trunc = nk.poisson_truncate(0.0, 1e-12)
    np.testing.assert_array_equal(trunc.weights, [1.0])
    assert trunc.j_max == 0
    assert trunc.tail_mass == 0.0


@pytest.mark.parametrize("rate", [0.5, 5.0, 50.0, 300.0])
def test_poisson_truncate_weights(rate):
    trunc = nk.poisson_truncate(rate, 1e-12)
    j = np.arange(trunc.j_max + 1)
    np.testing.assert_allclose(trunc.weights, stats.poisson.pmf(j, rate),
                               rtol=1e-12, atol=1e-300)
    assert trunc.tail_mass <= 1e-12
    assert math.fsum(trunc.weights) >= 1 - 1e-12
    # j_max is the first index reaching the tolerance
    assert math.fsum(trunc.weights[:-1]) < 1 - 1e-12


def test_poisson_truncate_large_rate():
    '''Above the exp(-rate) underflow limit the recurrence starts at the mode.'''
    rate = 2500.0
    trunc = nk.poisson_truncate(rate, 1e-12)
    mode = int(rate)
    np.testing.assert_allclose(trunc.weights[mode],
                               stats.poisson.pmf(mode, rate), rtol=1e-9)
    assert trunc.tail_mass <= 1e-12
    assert trunc.j_max > rate + 5 * math.sqrt(rate)


def test_poisson_truncate_domain():
    with pytest.raises(DomainError):
        nk.poisson_truncate(-1.0, 1e-12)
    with pytest.raises(DomainError):
        nk.poisson_truncate(float('inf'), 1e-12)
    with pytest.raises(DomainError):
        nk.poisson_truncate(1.0, 0.0)


def test_quad_rule_exactness():
    rule = nk.quad_rule(16)
    assert len(rule.nodes) == 16
    assert np.all((rule.nodes > 0) & (rule.nodes < 1))
    for k in range(32):
        np.testing.assert_allclose(np.dot(rule.weights, rule.nodes ** k),
                                   1.0 / (k + 1), rtol=1e-13)


def test_quad_rule_is_cached_and_read_only():
    assert nk.quad_rule(64) is nk.quad_rule(64)
    with pytest.raises(ValueError):
        nk.quad_rule(64).nodes[0] = 0.5


@pytest.mark.parametrize("order", [0, 1025, 16.0, True])
def test_quad_rule_domain(order):
    with pytest.raises(DomainError):
        nk.quad_rule(order)


@pytest.mark.parametrize("a,b", [
    (2.0, 3.0), (0.5, 0.5), (0.7, 3.0), (50.0, 1.0), (1.0, 0.5),
    (500.0, 1.0), (2.0, 60.0),
])
def test_beta_expectation_moments(a, b):
    rule = nk.quad_rule(128)
    np.testing.assert_allclose(nk.beta_expectation(lambda x: x, a, b, rule),
                               a / (a + b), rtol=1e-12)
    second = a * (a + 1) / ((a + b) * (a + b + 1))
    np.testing.assert_allclose(
        nk.beta_expectation(lambda x: x * x, a, b, rule), second, rtol=1e-12)


def test_beta_expectation_fractional_power():
    '''E[(1 - B)^0.3] = B(a, b + 0.3)/B(a, b), with a fractional power at 1.'''
    rule = nk.quad_rule(128)
    for a, b in [(2.0, 1.0), (3.0, 2.5), (0.5, 0.5)]:
        exact = math.exp(nk.log_beta(a, b + 0.3) - nk.log_beta(a, b))
        np.testing.assert_allclose(
            nk.beta_expectation(lambda x: (1 - x) ** 0.3, a, b, rule),
            exact, rtol=1e-11)


def test_beta_expectation_vectorised():
    rule = nk.quad_rule(128)
    a = np.array([1.0, 2.5, 10.0, 40.0])
    result = nk.beta_expectation(lambda x: 1 - x, a, 1.5, rule)
    assert result.shape == (4,)
    np.testing.assert_allclose(result, 1.5 / (a + 1.5), rtol=1e-12)


def test_beta_expectation_breaks():
    '''A kink at 0.4 is integrated exactly once it is a panel edge.'''
    rule = nk.quad_rule(64)
    value = nk.beta_expectation(lambda x: np.maximum(0.0, x - 0.4),
                                2.0, 2.0, rule, breaks=(0.4,))
    np.testing.assert_allclose(value, 0.1512, rtol=1e-13)


def test_beta_expectation_domain():
    with pytest.raises(DomainError):
        nk.beta_expectation(lambda x: x, 0.0, 1.0, nk.quad_rule(16))


def test_central_difference():
    d = nk.central_difference(np.sin, 1.0, 1e-3)
    np.testing.assert_allclose(d, math.cos(1.0), rtol=1e-6)
    r = nk.central_difference(np.sin, 1.0, 1e-3, richardson=True)
    assert abs(r - math.cos(1.0)) < abs(d - math.cos(1.0))
    np.testing.assert_allclose(r, math.cos(1.0), rtol=1e-11)


def test_generator_streams():
    seed = SeedSpec(20240601, 3)
    a = nk.generator_for(seed).standard_normal(5)
    b = nk.generator_for(seed).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    c = nk.generator_for(SeedSpec(20240601, 4)).standard_normal(5)
    d = nk.generator_for(seed, 1).standard_normal(5)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_sample_chi2():
    x = nk.sample_chi2(3.0, SeedSpec(1), 200000)
    assert x.shape == (200000,)
    se = math.sqrt(2 * 3.0 / len(x))
    assert abs(x.mean() - 3.0) < 5 * se
    with pytest.raises(DomainError):
        nk.sample_chi2(0.0, SeedSpec(1), 10)
    with pytest.raises(DomainError):
        nk.sample_chi2(1.0, SeedSpec(1), 0)


def test_special_function_identities():
    x = np.array([1e-3, 0.37, 1.0, 4.5, 120.0, 1e5])
    np.testing.assert_allclose(nk.digamma(x + 1), nk.digamma(x) + 1 / x,
                               rtol=1e-13, atol=1e-12)
    for a, b in [(0.3, 7.0), (2.5, 1.5), (40.0, 0.5)]:
        np.testing.assert_allclose(nk.log_beta(a, b), nk.log_beta(b, a),
                                   rtol=1e-15)


@pytest.mark.parametrize("rate", [0.0, 0.3, 7.0, 120.0, 2500.0])
def test_poisson_weights_unimodal(rate):
    w = nk.poisson_truncate(rate, 1e-12).weights
    assert np.all(w >= 0)
    assert math.fsum(w) <= 1 + 1e-15
    steps = np.diff(w)
    peak = int(np.argmax(w))
    assert np.all(steps[:peak] >= 0)
    assert np.all(steps[peak:] <= 0)


@pytest.mark.parametrize("a,b", [
    (0.8635, 1.0181), (0.9, 1.01), (1.01, 0.9), (0.05, 1.7), (0.05, 0.05),
    (0.1, 5.0), (0.3, 0.8), (3.3, 0.07),
])
def test_beta_expectation_non_half_integer_shapes(a, b):
    '''Shapes where the tail quantiles are unresolvable or the density has
    a strong endpoint singularity.'''
    rule = nk.quad_rule(128)
    np.testing.assert_allclose(nk.beta_expectation(lambda x: 1.0, a, b, rule),
                               1.0, rtol=1e-12)
    np.testing.assert_allclose(nk.beta_expectation(lambda x: x, a, b, rule),
                               a / (a + b), rtol=1e-11)


def test_beta_expectation_mass_beyond_the_quantiles():
    '''func may be large where the density is small: E[(10 B + 0.1)^-12]
    for B ~ Beta(7, 5) has a share of order 1e-4 below the 1e-17 quantile.'''
    rule = nk.quad_rule(128)
    value = nk.beta_expectation(lambda x: (10 * x + 0.1) ** -12, 7.0, 5.0,
                                rule)
    # Euler's integral: B(7, 5) E[...] = 0.1^-12 B(7, 5) 2F1(12, 7; 12; -100)
    # and 2F1(12, 7; 12; z) = (1 - z)^-7
    exact = 0.1 ** -12 * 101.0 ** -7
    np.testing.assert_allclose(value, exact, rtol=1e-10)


def test_beta_expectation_non_finite_raises():
    with pytest.raises(DomainError):
        nk.beta_expectation(lambda x: np.full_like(x, np.nan), 2.0, 2.0,
                            nk.quad_rule(16))


def test_sample_chi2_moments():
    x = nk.sample_chi2(2.0, SeedSpec(20240601), 1000000)
    assert abs(x.mean() - 2.0) < 5 * 2.0 / 1000
    y = nk.sample_chi2(5.0, SeedSpec(20240601, 1), 1000000)
    # var(s^2) = (mu4 - sigma^4)/N with mu4 = sigma^4 (3 + 12/k)
    se = math.sqrt((100.0 * (3 + 12 / 5.0) - 100.0) / len(y))
    assert abs(y.var(ddof=1) - 10.0) < 5 * se


def test_distinct_streams_agree_in_distribution():
    count = 200000
    means = []
    for stream in range(4):
        x = nk.sample_chi2(4.0, SeedSpec(7, stream), count)
        means.append(x.mean())
    se = math.sqrt(2 * 4.0 / count)
    for i in range(4):
        for k in range(i + 1, 4):
            assert means[i] != means[k]
            assert abs(means[i] - means[k]) < 5 * math.sqrt(2) * se
