"""Entropy loss and the scale equivariant estimators (1 - phi(W)) S/n.

Three choices of phi are supported:

- best equivariant, phi = 0, i.e. S/n;
- Stein's truncated estimator, phi(w) = max(0, (p - n w)/(p + n)), i.e.
  min(S/n, (|X|^2 + S)/(p + n));
- the simple Bayes estimator, phi(w) = alpha/(alpha + 1 + w).
"""

import numpy as np

from shrinkvar.core import (BEST_EQUIVARIANT, SIMPLE_BAYES, STEIN_TRUNCATED,
                            DomainError, PriorHyper, as_array)


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def entropy_loss(delta, sigma2):
    """Entropy (Stein) loss delta/sigma2 - log(delta/sigma2) - 1.

    Accepts scalars or arrays.
    """
    delta = as_array(delta)
    sigma2 = as_array(sigma2)
    if np.any(~(delta > 0)) or np.any(~(sigma2 > 0)):
        raise DomainError("entropy loss needs delta > 0 and sigma2 > 0")
    r = delta / sigma2
    return _unwrap(r - np.log(r) - 1.0)


def phi_of(spec, w, dims):
    """phi(w) of the estimator family described by `spec`."""
    w = as_array(w)
    if spec.family == BEST_EQUIVARIANT:
        phi = np.zeros_like(w)
    elif spec.family == STEIN_TRUNCATED:
        phi = np.maximum(0.0, (dims.p - dims.n * w) / (dims.p + dims.n))
    elif spec.family == SIMPLE_BAYES:
        phi = spec.alpha / (spec.alpha + 1.0 + w)
    else:
        raise DomainError("Unknown estimator family %r" % (spec.family,))
    return _unwrap(phi)


def phi_breaks(spec, dims):
    """Points of B = U/(U+V) in (0, 1) where phi(B/(1-B)) has a kink."""
    if spec.family == STEIN_TRUNCATED:
        return (dims.p / float(dims.p + dims.n),)
    return ()


def estimate_variance(spec, x_sq, s, dims):
    """The estimate (1 - phi(|x|^2/s)) s/n of sigma^2."""
    x_sq = as_array(x_sq)
    s = as_array(s)
    if np.any(~(s > 0)):
        raise DomainError("s must be positive")
    if np.any(~(x_sq >= 0)):
        raise DomainError("x_sq must be non-negative")
    return _unwrap((1.0 - as_array(phi_of(spec, x_sq / s, dims))) * s / dims.n)


def estimate_mean(x, s, alpha):
    """The simple Bayes estimate (1 - alpha/(alpha + 1 + |x|^2/s)) x of
    the mean vector."""
    x = as_array(x)
    if not s > 0:
        raise DomainError("s must be positive, got %r" % (s,))
    if not alpha > 0:
        raise DomainError("alpha must be positive, got %r" % (alpha,))
    w = np.dot(x, x) / s
    return (1.0 - alpha / (alpha + 1.0 + w)) * x


def alpha_from_hyper(h):
    """alpha = (p/2 + a + 1)/(n/2) induced by the prior hyperparameter."""
    if not isinstance(h, PriorHyper):
        raise DomainError("expected a PriorHyper, got %r" % (h,))
    alpha = (h.dims.p / 2.0 + h.a + 1.0) / (h.dims.n / 2.0)
    if not alpha > 0:
        raise DomainError("alpha must be positive, got %r" % alpha)
    return alpha
