'''Tests of the hierarchical prior's marginal and Bayes estimators'''

import math

import numpy as np

import shrinkvar as sv
from shrinkvar import bayesverify as bv
from shrinkvar import numkernel as nk

import pytest

cfg = sv.QuadConfig()
PRIORS = [(4, 2, -2.0), (3, 5, 0.0), (10, 10, 1.0)]


def prior(p, n, a):
    return sv.PriorHyper(a, sv.ProblemDims(p, n))


def test_marginal_closed_hand_value():
    # c = Gamma(2) 2^2 B(1, 1) = 4 and m = 4/(1 * 2)
    h = prior(4, 2, -2.0)
    np.testing.assert_allclose(math.exp(bv.log_normaliser(h)), 4.0,
                               rtol=1e-14)
    np.testing.assert_allclose(bv.marginal_closed(1.0, 1.0, h), 2.0,
                               rtol=1e-14)


def test_marginal_closed_scaling():
    h = prior(3, 5, 0.0)
    big_a = 3 / 2.0 + 0.0 + 1
    for c in [0.5, 2.0, 7.0]:
        np.testing.assert_allclose(
            bv.marginal_closed(c * c * 1.3, c * c * 0.8, h),
            c ** (-5 - 2 * big_a) * bv.marginal_closed(1.3, 0.8, h),
            rtol=1e-13)


def test_marginal_numeric_at_origin():
    '''At x = 0 the lambda integral is a plain beta integral.'''
    h = prior(4, 2, -2.0)
    s = 1.7
    k = 4 / 2.0 + 2 / 2.0 - 2.0 + 1
    expected = math.exp(bv.log_normaliser(h)) * s ** -k
    np.testing.assert_allclose(bv.marginal_numeric(0.0, s, h, cfg), expected,
                               rtol=1e-13)


@pytest.mark.parametrize("p,n,a", PRIORS)
def test_marginal_ratio_constancy(p, n, a):
    h = prior(p, n, a)
    rng = nk.generator_for(sv.SeedSpec(7), p, n)
    check = bv.marginal_ratio_check(bv.random_points(rng, 20), h, cfg)
    assert len(check.ratios) == 20
    assert all(r > 0 for r in check.ratios)
    assert check.max_rel_spread <= 1e-6
    # with the Gamma and power of 2 prefactor the constant is one
    np.testing.assert_allclose(check.ratios, 1.0, rtol=1e-9)


@pytest.mark.parametrize("p,n,a", [(4, 2, -2.9), (2, 4, -1.9), (3, 5, -2.45)])
def test_marginal_ratio_small_first_shape(p, n, a):
    '''p/2 + a + 1 close to 0 puts most of the lambda mass against 0.'''
    h = prior(p, n, a)
    rng = nk.generator_for(sv.SeedSpec(7), p, n)
    check = bv.marginal_ratio_check(bv.random_points(rng, 20), h, cfg)
    assert check.max_rel_spread <= 1e-6
    np.testing.assert_allclose(check.ratios, 1.0, rtol=1e-9)


def test_marginal_with_fractional_exponents():
    '''n = 1 and p/2 + a < 0 both put a singularity at an end of the
    lambda density.'''
    h = prior(1, 1, -1.2)
    points = [(0.3, 1.0), (2.0, 0.5), (8.0, 3.0)]
    check = bv.marginal_ratio_check(points, h, cfg)
    assert check.max_rel_spread <= 1e-6


def test_marginal_domain():
    h = prior(4, 2, -2.0)
    with pytest.raises(sv.DomainError):
        bv.marginal_closed(1.0, 0.0, h)
    with pytest.raises(sv.DomainError):
        bv.marginal_numeric(-1.0, 1.0, h, cfg)
    with pytest.raises(sv.DomainError):
        bv.marginal_ratio_check([], h, cfg)


def test_s_derivative_hand_value():
    h = prior(4, 2, -2.0)
    np.testing.assert_allclose(bv.s_derivative_closed(1.0, 1.0, h),
                               -1.5 * bv.marginal_closed(1.0, 1.0, h),
                               rtol=1e-15)


@pytest.mark.parametrize("p,n,a", PRIORS)
def test_gradient_identities(p, n, a):
    h = prior(p, n, a)
    for x_sq, s in [(1.0, 1.0), (0.2, 3.0), (5.0, 0.4)]:
        errors = bv.gradient_identity_check(x_sq, s, h, 1e-5)
        assert max(errors) <= 1e-8


def test_radial_derivative_vanishes_at_origin():
    h = prior(4, 2, -2.0)
    assert bv.radial_derivative_closed(0.0, 1.0, h) == 0.0


def test_posterior_hand_values():
    h = prior(4, 2, -2.0)
    check = bv.posterior_estimates_numeric(2.0, 2.0, h, cfg)
    np.testing.assert_allclose(check.shrink_closed, 2 / 3.0, rtol=1e-15)
    np.testing.assert_allclose(check.sigma2_closed, 2 / 3.0 * 2.0 / 2,
                               rtol=1e-15)


def test_posterior_shrink_without_shrinkage():
    h = prior(4, 2, -2.999999)
    assert 1 - bv.shrink_closed(1.0, 1.0, h) < 1e-5


@pytest.mark.parametrize("p,n,a", PRIORS)
def test_posterior_numeric_matches_closed(p, n, a):
    h = prior(p, n, a)
    rng = nk.generator_for(sv.SeedSpec(3), p, n)
    for x_sq, s in bv.random_points(rng, 10):
        check = bv.posterior_estimates_numeric(x_sq, s, h, cfg)
        assert 0 < check.shrink_closed < 1
        np.testing.assert_allclose(check.shrink_numeric, check.shrink_closed,
                                   rtol=1e-5)
        np.testing.assert_allclose(check.sigma2_numeric, check.sigma2_closed,
                                   rtol=1e-5)
        np.testing.assert_allclose(check.sigma2_closed,
                                   check.shrink_closed * s / n, rtol=1e-15)


def test_beta_change_of_variables():
    rng = np.random.default_rng(17)
    for _ in range(25):
        alpha_e, beta_e = rng.uniform(-0.5, 3.0, 2)
        gamma_e = rng.uniform(0.0, 5.0)
        w = rng.uniform(0.0, 10.0)
        left, right = bv.beta_cov_identity(alpha_e, beta_e, gamma_e, w, cfg)
        np.testing.assert_allclose(left, right, rtol=1e-10)


def test_beta_change_of_variables_at_zero():
    left, right = bv.beta_cov_identity(1.0, 2.0, 3.0, 0.0, cfg)
    np.testing.assert_allclose(left, 1 / 12.0, rtol=1e-13)
    np.testing.assert_allclose(right, 1 / 12.0, rtol=1e-13)
    with pytest.raises(sv.DomainError):
        bv.beta_cov_identity(-1.0, 2.0, 3.0, 1.0, cfg)


def test_completing_square():
    rng = np.random.default_rng(23)
    for _ in range(100):
        p = int(rng.integers(1, 12))
        x = rng.normal(size=p)
        theta = rng.normal(size=p)
        lam = rng.uniform(0.01, 0.99)
        assert bv.completing_square_residual(x, theta, lam) <= 1e-12
    with pytest.raises(sv.DomainError):
        bv.completing_square_residual([1.0], [1.0], 1.0)


@pytest.mark.parametrize("alpha_e,beta_e,gamma_e,w", [
    (-0.1365, 0.0181, 0.9009, 9.3457),
    (-0.1, 0.01, 0.5, 2.0),
    (-0.45, -0.45, 4.0, 10.0),
])
def test_beta_change_of_variables_near_unit_shapes(alpha_e, beta_e, gamma_e,
                                                   w):
    left, right = bv.beta_cov_identity(alpha_e, beta_e, gamma_e, w, cfg)
    assert left > 0
    np.testing.assert_allclose(left, right, rtol=1e-10)
