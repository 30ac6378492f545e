"""Frequentist risk of scale equivariant variance estimators under
entropy loss.

Conditional on the Poisson index J = j, U = |X|^2/sigma^2 ~ chi2(p + 2j)
and V = S/sigma^2 ~ chi2(n). Writing B = U/(U + V) ~ Beta(p/2 + j, n/2)
and T = U + V ~ chi2(m_j), m_j = p + n + 2j, B and T are independent,
W = B/(1 - B) and V = (1 - B) T. Every expectation below is therefore a
one dimensional beta integral, weighted over j by Poisson(tau/2).
"""

import logging
import math

import numpy as np

from shrinkvar import numkernel as nk
from shrinkvar.core import (BEST_EQUIVARIANT, FAMILIES, MONTE_CARLO,
                            QUADRATURE, DomainError, EstimatorSpec, McConfig,
                            QuadConfig, RiskEstimate, TruncationError,
                            as_noncentrality)
from shrinkvar.model import entropy_loss, phi_breaks, phi_of

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _mixture(tau, cfg):
    """Poisson weights for `tau` and the indices j with non-zero weight."""
    if not isinstance(cfg, QuadConfig):
        raise DomainError("expected a QuadConfig, got %r" % (cfg,))
    tau = as_noncentrality(tau)
    trunc = nk.poisson_truncate(tau.rate, cfg.tail_tol)
    if trunc.j_max > cfg.j_cap:
        raise TruncationError(
            "tau=%g needs %d mixture terms, more than j_cap=%d"
            % (tau.tau, trunc.j_max + 1, cfg.j_cap), trunc.j_max, cfg.j_cap)
    j = np.nonzero(trunc.weights)[0]
    return trunc, j, trunc.weights[j]


def risk_terms(spec, dims, j, rule):
    """Conditional risks R_j of the estimator given J = j (vectorised
    over the array of indices `j`)."""
    j = np.asarray(j, dtype=np.float64)
    a = dims.p / 2.0 + j
    c = dims.n / 2.0
    m = dims.p + dims.n + 2.0 * j
    breaks = phi_breaks(spec, dims)

    def shrink(b):
        return 1.0 - phi_of(spec, b / (1.0 - b), dims)

    e_scaled = nk.beta_expectation(lambda b: shrink(b) * (1.0 - b),
                                   a, c, rule, breaks)
    if spec.family == BEST_EQUIVARIANT:
        e_log_shrink = 0.0
    else:
        e_log_shrink = nk.beta_expectation(lambda b: np.log(shrink(b)),
                                           a, c, rule, breaks)
    # E[ln V] = E[ln T] + E[ln(1 - B)]
    e_log_t = nk.digamma(m / 2.0) + LN2
    e_log_1mb = nk.digamma(c) - nk.digamma(m / 2.0)
    return (m / dims.n * e_scaled - e_log_shrink - e_log_1mb - e_log_t
            + math.log(dims.n) - 1.0)


def risk_exact(spec, dims, tau, cfg):
    """Risk R(theta, sigma^2, delta_phi) by quadrature.

    The error bound covers the dropped Poisson tail, taking the last
    computed conditional risk as the size of the dropped terms.
    """
    trunc, j, w = _mixture(tau, cfg)
    r = risk_terms(spec, dims, j, nk.quad_rule(cfg.order))
    value = float(np.dot(w, r))
    return RiskEstimate(value, trunc.tail_mass * abs(float(r[-1])),
                        QUADRATURE, trunc.j_max)


def delta_terms(alpha, dims, j, rule):
    """Conditional risk differences Delta_j given J = j.

    Uses 1 - alpha/(alpha + 1 + W) = 1/(alpha + 1 - alpha B) and
    V/(alpha + 1 + W) = (1 - B)^2 T/(alpha + 1 - alpha B) with E[T] = m_j.
    """
    j = np.asarray(j, dtype=np.float64)
    a = dims.p / 2.0 + j
    c = dims.n / 2.0
    m = dims.p + dims.n + 2.0 * j
    first = nk.beta_expectation(
        lambda b: (1.0 - b) ** 2 / (alpha + 1.0 - alpha * b), a, c, rule)
    second = nk.beta_expectation(
        lambda b: np.log1p(alpha * (1.0 - b)), a, c, rule)
    return alpha / dims.n * m * first - second


def delta_risk(alpha, dims, tau, cfg):
    """Delta = R(S/n) - R(simple Bayes estimator with this alpha)."""
    if not alpha > 0:
        raise DomainError("alpha must be positive, got %r" % (alpha,))
    trunc, j, w = _mixture(tau, cfg)
    d = delta_terms(alpha, dims, j, nk.quad_rule(cfg.order))
    value = float(np.dot(w, d))
    return RiskEstimate(value, trunc.tail_mass * abs(float(d[-1])),
                        QUADRATURE, trunc.j_max)


def risk_curve(spec, dims, taus, cfg):
    return [risk_exact(spec, dims, tau, cfg) for tau in taus]


### Monte Carlo

def _check_mc(cfg):
    if not isinstance(cfg, McConfig):
        raise DomainError("expected a McConfig, got %r" % (cfg,))


def _stream_keys(spec, cfg):
    _check_mc(cfg)
    if cfg.crn:
        return ()
    return (FAMILIES.index(spec.family) + 1,)


def _draw(dims, tau, cfg, keys=()):
    _check_mc(cfg)
    tau = as_noncentrality(tau)
    rng = nk.generator_for(cfg.seed, *keys)
    j = rng.poisson(tau.rate, size=cfg.samples)
    u = rng.chisquare(dims.p + 2 * j)
    v = rng.chisquare(dims.n, size=cfg.samples)
    return j, u, v


def _losses(spec, dims, u, v):
    shrink = 1.0 - phi_of(spec, u / v, dims)
    return entropy_loss(shrink * v / dims.n, 1.0)


def _mean_and_error(x):
    return float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(len(x)))


def risk_mc(spec, dims, tau, cfg):
    """Risk by direct simulation of (J, U, V), with its standard error."""
    j, u, v = _draw(dims, tau, cfg, _stream_keys(spec, cfg))
    value, se = _mean_and_error(_losses(spec, dims, u, v))
    return RiskEstimate(value, se, MONTE_CARLO, int(j.max()))


def delta_risk_mc(alpha, dims, tau, cfg):
    """Paired Monte Carlo estimate of Delta: both estimators are applied
    to the same draws, so the standard error is that of the difference."""
    j, u, v = _draw(dims, tau, cfg)
    diff = (_losses(EstimatorSpec.best_equivariant(), dims, u, v)
            - _losses(EstimatorSpec.simple_bayes(alpha), dims, u, v))
    value, se = _mean_and_error(diff)
    return RiskEstimate(value, se, MONTE_CARLO, int(j.max()))
