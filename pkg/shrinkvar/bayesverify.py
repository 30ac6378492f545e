"""Numerical checks of the hierarchical prior behind the simple Bayes
estimator.

With eta = 1/sigma^2, theta | lambda, eta ~ N(0, eta^-1 (1 - lambda)/lambda I),
lambda with density proportional to lambda^a (1 - lambda)^(n/2 - 1) and
eta with density proportional to eta^a, integrating eta out analytically
leaves the marginal

    m(x, s) = Gamma(k) 2^k B(A, n/2) E[(lambda |x|^2 + s)^-k],
    lambda ~ Beta(A, n/2), A = p/2 + a + 1, k = A + n/2,

whose closed form is c s^(-n/2) (|x|^2 + s)^-A with
c = Gamma(k) 2^k B(A, n/2). The generalized Bayes estimators of theta and
sigma^2 are x + grad_x m/(-2 dm/ds) and m/(-2 dm/ds).
"""

import logging
import math

import numpy as np

from shrinkvar import numkernel as nk
from shrinkvar.core import (DomainError, MarginalCheck, PosteriorCheck,
                            PriorHyper, as_array)
from shrinkvar.model import alpha_from_hyper

logger = logging.getLogger(__name__)

# A first-pass finite difference whose relative error exceeds this is
# recomputed with Richardson extrapolation.
RICHARDSON_THRESHOLD = 1e-7


def _exponents(h):
    if not isinstance(h, PriorHyper):
        raise DomainError("expected a PriorHyper, got %r" % (h,))
    big_a = h.dims.p / 2.0 + h.a + 1.0
    return big_a, big_a + h.dims.n / 2.0


def _check_point(x_sq, s):
    if not x_sq >= 0:
        raise DomainError("x_sq must be non-negative, got %r" % (x_sq,))
    if not s > 0:
        raise DomainError("s must be positive, got %r" % (s,))


def log_normaliser(h):
    """log c = log Gamma(k) + k log 2 + log B(A, n/2)."""
    big_a, k = _exponents(h)
    return nk.log_gamma(k) + k * math.log(2.0) + nk.log_beta(big_a,
                                                             h.dims.n / 2.0)


def marginal_closed(x_sq, s, h):
    _check_point(x_sq, s)
    big_a, _ = _exponents(h)
    return math.exp(log_normaliser(h) - h.dims.n / 2.0 * math.log(s)
                    - big_a * math.log(x_sq + s))


def marginal_numeric(x_sq, s, h, cfg):
    """The marginal by quadrature of the remaining lambda integral."""
    _check_point(x_sq, s)
    big_a, k = _exponents(h)
    e = nk.beta_expectation(lambda lam: (lam * x_sq + s) ** -k,
                            big_a, h.dims.n / 2.0, nk.quad_rule(cfg.order))
    return math.exp(log_normaliser(h)) * e


def marginal_ratio_check(points, h, cfg):
    """Ratios marginal_numeric/marginal_closed over `points`, pairs of
    (x_sq, s), and their relative spread."""
    points = [(float(x), float(s)) for x, s in points]
    if not points:
        raise DomainError("points must not be empty")
    ratios = [marginal_numeric(x, s, h, cfg) / marginal_closed(x, s, h)
              for x, s in points]
    spread = (max(ratios) - min(ratios)) / np.mean(ratios)
    logger.debug("marginal ratio spread %.3g over %d points", spread,
                 len(points))
    return MarginalCheck(points, ratios, float(spread))


def random_points(rng, count, low=0.1, high=10.0):
    """`count` points (x_sq, s) drawn uniformly from [low, high]^2."""
    xy = rng.uniform(low, high, size=(count, 2))
    return [(float(x), float(s)) for x, s in xy]


### Gradient identities

def radial_derivative_closed(x_sq, s, h):
    """d m/d r along r = |x|: -2 A r m/(r^2 + s)."""
    big_a, _ = _exponents(h)
    r = math.sqrt(x_sq)
    return -2.0 * big_a * r / (x_sq + s) * marginal_closed(x_sq, s, h)


def s_derivative_closed(x_sq, s, h):
    """d m/d s = -(A/(|x|^2 + s) + (n/2)/s) m."""
    big_a, _ = _exponents(h)
    return -(big_a / (x_sq + s) + h.dims.n / 2.0 / s) \
        * marginal_closed(x_sq, s, h)


def _derivatives(marginal, x_sq, s, fd_step, richardson=False):
    """Centered differences of `marginal` along r = |x| and along s,
    with steps `fd_step` relative to r and s."""
    r = math.sqrt(x_sq)
    d_r = nk.central_difference(lambda t: marginal(t * t, s), r,
                                fd_step * r, richardson)
    d_s = nk.central_difference(lambda t: marginal(x_sq, t), s,
                                fd_step * s, richardson)
    return d_r, d_s


def _relative(numeric, exact):
    return abs(numeric - exact) / abs(exact)


def gradient_identity_check(x_sq, s, h, fd_step=1e-5):
    """Relative errors of the analytic gradient coefficients against
    finite differences of `marginal_closed`.

    Returns (radial error, s error).
    """
    if not x_sq > 0:
        raise DomainError("x_sq must be positive, got %r" % (x_sq,))
    if not 0 < fd_step < 1e-2:
        raise DomainError("fd_step must lie in (0, 1e-2)")

    def marginal(x, t):
        return marginal_closed(x, t, h)

    exact = (radial_derivative_closed(x_sq, s, h),
             s_derivative_closed(x_sq, s, h))
    numeric = _derivatives(marginal, x_sq, s, fd_step)
    errors = [_relative(d, e) for d, e in zip(numeric, exact)]
    if max(errors) > RICHARDSON_THRESHOLD:
        numeric = _derivatives(marginal, x_sq, s, fd_step, richardson=True)
        errors = [_relative(d, e) for d, e in zip(numeric, exact)]
    return tuple(errors)


### Posterior estimates

def shrink_closed(x_sq, s, h):
    alpha = alpha_from_hyper(h)
    return 1.0 - alpha / (alpha + 1.0 + x_sq / s)


def posterior_estimates_numeric(x_sq, s, h, cfg, fd_step=1e-5):
    """Shrink factor of the mean estimate and the variance estimate from
    `marginal_numeric` and its finite differences, alongside their closed
    forms."""
    if not x_sq > 0:
        raise DomainError("x_sq must be positive, got %r" % (x_sq,))
    _check_point(x_sq, s)

    def marginal(x, t):
        return marginal_numeric(x, t, h, cfg)

    m = marginal(x_sq, s)
    d_r, d_s = _derivatives(marginal, x_sq, s, fd_step)
    shrink = 1.0 + d_r / (math.sqrt(x_sq) * -2.0 * d_s)
    sigma2 = m / (-2.0 * d_s)

    closed = shrink_closed(x_sq, s, h)
    return PosteriorCheck(shrink, closed, sigma2, closed * s / h.dims.n)


### Identities used in deriving the marginal

def beta_cov_identity(alpha_e, beta_e, gamma_e, w, cfg):
    """Both sides of the change of variables t = (w + 1) lambda/(w lambda + 1):

        int lambda^alpha_e (1 - lambda)^beta_e (1 + w lambda)^-gamma_e
          = (w + 1)^(-alpha_e - 1)
            int t^alpha_e (1 - t)^beta_e (1 - t w/(w + 1))^(gamma_e - alpha_e - beta_e - 2)

    with both integrals over (0, 1). Returns (left, right).
    """
    if not (alpha_e > -1 and beta_e > -1):
        raise DomainError("the integrals need alpha_e > -1 and beta_e > -1")
    if not w >= 0:
        raise DomainError("w must be non-negative, got %r" % (w,))
    rule = nk.quad_rule(cfg.order)
    a, b = alpha_e + 1.0, beta_e + 1.0
    scale = math.exp(nk.log_beta(a, b))
    left = scale * nk.beta_expectation(lambda lam: (1.0 + w * lam) ** -gamma_e,
                                       a, b, rule)
    power = gamma_e - alpha_e - beta_e - 2.0
    right = (w + 1.0) ** -a * scale * nk.beta_expectation(
        lambda t: (1.0 - t * w / (w + 1.0)) ** power, a, b, rule)
    return left, right


def completing_square_residual(x, theta, lam):
    """Relative residual of

        |x - theta|^2 + lam/(1 - lam) |theta|^2
          = |theta - (1 - lam) x|^2/(1 - lam) + lam |x|^2.
    """
    x = as_array(x)
    theta = as_array(theta)
    if not 0 < lam < 1:
        raise DomainError("lam must lie in (0, 1), got %r" % (lam,))
    left = np.sum((x - theta) ** 2) + lam / (1.0 - lam) * np.sum(theta ** 2)
    right = (np.sum((theta - (1.0 - lam) * x) ** 2) / (1.0 - lam)
             + lam * np.sum(x ** 2))
    return float(abs(left - right) / max(1.0, abs(left)))
