'''Tests of the exact and Monte Carlo risk engines'''

import math

import numpy as np

import shrinkvar as sv
from shrinkvar import numkernel as nk
from shrinkvar.minimax import alpha_star
from shrinkvar.risk import (delta_risk, delta_risk_mc, risk_curve,
                            risk_exact, risk_mc)

import pytest

EULER_GAMMA = 0.5772156649015329
ANCHOR = 8 * math.log(2.0) - 5.5

CELLS = [(1, 1), (3, 5), (4, 2), (10, 10)]
FRACTIONS = [0.25, 0.5, 1.0]
TAUS = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0]

cfg = sv.QuadConfig()


def best_equivariant_risk(n):
    return math.log(n) - math.log(2.0) - nk.digamma(n / 2.0)


@pytest.mark.parametrize("n", range(1, 31))
def test_best_equivariant_risk(n):
    '''The risk of S/n is log n - log 2 - psi(n/2) whatever tau is.'''
    dims = sv.ProblemDims(3, n)
    for tau in [0.0, 1.0, 10.0, 100.0]:
        est = risk_exact(sv.EstimatorSpec.best_equivariant(), dims, tau, cfg)
        np.testing.assert_allclose(est.value, best_equivariant_risk(n),
                                   rtol=0, atol=1e-10)
        assert est.method == sv.QUADRATURE


def test_best_equivariant_risk_n2_is_euler_gamma():
    est = risk_exact(sv.EstimatorSpec.best_equivariant(),
                     sv.ProblemDims(4, 2), 5.0, cfg)
    np.testing.assert_allclose(est.value, EULER_GAMMA, rtol=0, atol=1e-10)


def test_delta_anchor():
    est = delta_risk(1.0, sv.ProblemDims(4, 2), 0.0, cfg)
    np.testing.assert_allclose(est.value, ANCHOR, rtol=0, atol=1e-10)
    np.testing.assert_allclose(est.value, 0.0451774, atol=1e-7)
    assert est.j_max_used == 0


def test_simple_bayes_risk_at_origin():
    est = risk_exact(sv.EstimatorSpec.simple_bayes(1.0), sv.ProblemDims(4, 2),
                     0.0, cfg)
    np.testing.assert_allclose(est.value, EULER_GAMMA - ANCHOR, rtol=0,
                               atol=1e-10)


@pytest.mark.parametrize("p,n", CELLS)
@pytest.mark.parametrize("frac", FRACTIONS)
def test_delta_is_risk_difference(p, n, frac):
    dims = sv.ProblemDims(p, n)
    alpha = frac * alpha_star(dims)
    for tau in TAUS:
        d = delta_risk(alpha, dims, tau, cfg).value
        r0 = risk_exact(sv.EstimatorSpec.best_equivariant(), dims, tau,
                        cfg).value
        r1 = risk_exact(sv.EstimatorSpec.simple_bayes(alpha), dims, tau,
                        cfg).value
        np.testing.assert_allclose(d, r0 - r1, rtol=0, atol=1e-8)
        assert d >= -1e-8


@pytest.mark.parametrize("p,n", [(4, 2), (10, 10)])
def test_stein_improves_on_best_equivariant(p, n):
    dims = sv.ProblemDims(p, n)
    r0 = best_equivariant_risk(n)
    for est in risk_curve(sv.EstimatorSpec.stein(), dims, TAUS, cfg):
        assert est.value <= r0 + 1e-10


def test_risk_approaches_best_equivariant_far_out():
    dims = sv.ProblemDims(4, 2)
    near = risk_exact(sv.EstimatorSpec.simple_bayes(1.0), dims, 1.0, cfg)
    far = risk_exact(sv.EstimatorSpec.simple_bayes(1.0), dims, 2000.0, cfg)
    assert abs(far.value - EULER_GAMMA) < abs(near.value - EULER_GAMMA)
    assert abs(far.value - EULER_GAMMA) < 5e-3


@pytest.mark.parametrize("spec", [sv.EstimatorSpec.stein(),
                                  sv.EstimatorSpec.simple_bayes(0.5),
                                  sv.EstimatorSpec.simple_bayes(2.0)])
@pytest.mark.parametrize("p,n", CELLS)
def test_doubling_the_order_leaves_the_risk_unchanged(spec, p, n):
    dims = sv.ProblemDims(p, n)
    coarse = sv.QuadConfig(order=128)
    fine = sv.QuadConfig(order=256)
    for tau in [0.0, 1.0, 10.0, 100.0]:
        a = risk_exact(spec, dims, tau, coarse).value
        b = risk_exact(spec, dims, tau, fine).value
        assert abs(a - b) < 1e-10


@pytest.mark.parametrize("p,n", CELLS)
def test_delta_vanishes_far_out(p, n):
    dims = sv.ProblemDims(p, n)
    est = delta_risk(alpha_star(dims), dims, 1e4, cfg)
    assert abs(est.value) <= 1e-2
    assert est.value >= -1e-10


def test_truncation_cap():
    small = sv.QuadConfig(j_cap=50)
    with pytest.raises(sv.TruncationError) as info:
        risk_exact(sv.EstimatorSpec.stein(), sv.ProblemDims(4, 2), 1000.0,
                   small)
    assert info.value.j_cap == 50
    assert info.value.j_max > 50


def test_domain_errors():
    dims = sv.ProblemDims(4, 2)
    with pytest.raises(sv.DomainError):
        risk_exact(sv.EstimatorSpec.stein(), dims, -1.0, cfg)
    with pytest.raises(sv.DomainError):
        delta_risk(0.0, dims, 1.0, cfg)
    with pytest.raises(sv.DomainError):
        risk_mc(sv.EstimatorSpec.stein(), dims, 1.0, cfg)


MC_CELLS = [
    (sv.EstimatorSpec.best_equivariant(), 4, 2, 0.0),
    (sv.EstimatorSpec.stein(), 4, 2, 2.0),
    (sv.EstimatorSpec.simple_bayes(1.0), 4, 2, 0.0),
    (sv.EstimatorSpec.simple_bayes(0.5), 3, 5, 10.0),
    (sv.EstimatorSpec.stein(), 10, 10, 25.0),
    (sv.EstimatorSpec.simple_bayes(0.2), 1, 1, 5.0),
]


@pytest.mark.parametrize("spec,p,n,tau", MC_CELLS)
def test_monte_carlo_agrees_with_quadrature(spec, p, n, tau):
    dims = sv.ProblemDims(p, n)
    mc = sv.McConfig(200000, sv.SeedSpec(20240601, 1))
    est = risk_mc(spec, dims, tau, mc)
    exact = risk_exact(spec, dims, tau, cfg)
    assert est.method == sv.MONTE_CARLO
    assert est.error_bound > 0
    assert abs(est.value - exact.value) < 4 * est.error_bound


def test_monte_carlo_is_reproducible():
    dims = sv.ProblemDims(4, 2)
    mc = sv.McConfig(5000, sv.SeedSpec(99))
    spec = sv.EstimatorSpec.stein()
    assert risk_mc(spec, dims, 3.0, mc) == risk_mc(spec, dims, 3.0, mc)


def test_common_random_numbers():
    '''With crn every estimator sees the same draws; without, they differ.'''
    dims = sv.ProblemDims(4, 2)
    shared = sv.McConfig(5000, sv.SeedSpec(5), crn=True)
    separate = sv.McConfig(5000, sv.SeedSpec(5), crn=False)
    a = risk_mc(sv.EstimatorSpec.best_equivariant(), dims, 1.0, shared)
    b = risk_mc(sv.EstimatorSpec.stein(), dims, 1.0, shared)
    c = risk_mc(sv.EstimatorSpec.stein(), dims, 1.0, separate)
    assert a.j_max_used == b.j_max_used
    assert b.value != c.value


def test_paired_delta_monte_carlo():
    dims = sv.ProblemDims(4, 2)
    mc = sv.McConfig(200000, sv.SeedSpec(7))
    est = delta_risk_mc(1.0, dims, 0.0, mc)
    assert abs(est.value - ANCHOR) < 4 * est.error_bound
    # pairing makes the difference much less noisy than either risk
    single = risk_mc(sv.EstimatorSpec.simple_bayes(1.0), dims, 0.0, mc)
    assert est.error_bound < single.error_bound


def _full_sample_cells():
    cells = []
    for i, (p, n) in enumerate(CELLS):
        alpha = alpha_star(sv.ProblemDims(p, n))
        cells.append((sv.EstimatorSpec.simple_bayes(alpha), p, n, 0.0))
        cells.append((sv.EstimatorSpec.simple_bayes(0.5 * alpha), p, n, 5.0))
        cells.append((sv.EstimatorSpec.stein(), p, n, [1.0, 10.0][i % 2]))
    return cells


@pytest.mark.parametrize("spec,p,n,tau", _full_sample_cells())
def test_monte_carlo_full_sample(spec, p, n, tau):
    '''A million draws land within four standard errors of quadrature.'''
    dims = sv.ProblemDims(p, n)
    mc = sv.McConfig(1000000, sv.SeedSpec(20240601, 2))
    est = risk_mc(spec, dims, tau, mc)
    exact = risk_exact(spec, dims, tau, cfg)
    assert abs(est.value - exact.value) \
        < 4 * (est.error_bound + exact.error_bound)
