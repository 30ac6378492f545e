"""Numerical kernels shared by the risk, minimax and Bayes modules.

Special functions are thin checked wrappers around scipy.special. All
one dimensional integrals over a beta distributed variable go through
`beta_expectation`, which evaluates a fixed order Gauss-Legendre rule on
panels covering (0, 1).
"""

import functools
import logging
import math

import numpy as np
from scipy import special

from shrinkvar.core import DomainError, PoissonTruncation, QuadRule, SeedSpec

logger = logging.getLogger(__name__)

MAX_ORDER = 1024

# Tail probability at which `beta_expectation` puts an extra panel edge
# at each end of a beta density.
EDGE_MASS = 1e-17

# Interior panel edges of `beta_expectation`, accumulating geometrically at
# 0 and 1 where the integrand may behave like a fractional power. Near 1
# the grading stops at the resolution of doubles. 1/2 separates the
# panels mapped at either end.
GRADING = 16.0
GRADED_EDGES = tuple(sorted([GRADING ** -k for k in range(1, 31)] + [0.5]
                            + [1.0 - GRADING ** -k for k in range(1, 13)]))

# exp(-rate) is representable below this; above it the Poisson weights
# are anchored at the mode instead.
LINEAR_START_LIMIT = 700.0


def _positive(name, x):
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("%s must be positive and finite, got %r" % (name, x))
    return x


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


### Special functions

def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    return _unwrap(special.gammaln(_positive("x", x)))


def digamma(x):
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    return _unwrap(special.digamma(_positive("x", x)))


def log_beta(a, b):
    """ln B(a, b) for a, b > 0."""
    return _unwrap(special.betaln(_positive("a", a), _positive("b", b)))


### Poisson mixture weights

def poisson_truncate(rate, tail_tol):
    """Poisson(rate) probabilities for j = 0..j_max.

    j_max is the smallest index at which the cumulative mass reaches
    1 - tail_tol. The weights follow the recurrence
    w_{j+1} = w_j * rate / (j + 1) from w_0 = exp(-rate); when exp(-rate)
    underflows the recurrence is started from the mode, evaluated in log
    space, and run in both directions.
    """
    if not (np.isfinite(rate) and rate >= 0):
        raise DomainError("rate must be finite and non-negative, got %r"
                          % (rate,))
    if not 0 < tail_tol < 1:
        raise DomainError("tail_tol must lie in (0, 1), got %r" % (tail_tol,))
    rate = float(rate)

    if rate < LINEAR_START_LIMIT:
        weights = [math.exp(-rate)]
    else:
        mode = int(math.floor(rate))
        w = math.exp(-rate + mode * math.log(rate) - special.gammaln(mode + 1))
        below = [w]
        for j in range(mode, 0, -1):
            w = w * j / rate
            if w == 0.0:
                below.extend([0.0] * j)
                break
            below.append(w)
        weights = below[::-1]

    total = math.fsum(weights)
    j = len(weights) - 1
    w = weights[-1]
    while total < 1.0 - tail_tol:
        w = w * rate / (j + 1)
        j += 1
        if w == 0.0 and j > rate:
            logger.warning("Poisson weights underflowed at j=%d before "
                           "reaching tail_tol=%g", j, tail_tol)
            break
        weights.append(w)
        total += w

    weights = np.array(weights)
    tail_mass = max(0.0, 1.0 - total)
    logger.debug("poisson_truncate(rate=%g) kept %d terms, tail mass %.3g",
                 rate, len(weights), tail_mass)
    return PoissonTruncation(rate, weights, len(weights) - 1, tail_mass)


### Quadrature

@functools.lru_cache(maxsize=None)
def quad_rule(order):
    """Gauss-Legendre nodes and weights mapped to (0, 1).

        :param int order: Number of points, 1 <= order <= 1024
    """
    if isinstance(order, bool) or not isinstance(order, int) \
       or not 1 <= order <= MAX_ORDER:
        raise DomainError("order must be an integer in [1, %d], got %r"
                          % (MAX_ORDER, order))
    x, w = special.roots_legendre(order)
    nodes = (x + 1.0) / 2.0
    weights = w / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes, weights)


def _support(a, b):
    """The [EDGE_MASS, 1 - EDGE_MASS] quantiles of each density, or 0 and
    1 where scipy cannot resolve them."""
    lo = special.betaincinv(a, b, EDGE_MASS)
    hi = 1.0 - special.betaincinv(b, a, EDGE_MASS)
    return (np.where(np.isfinite(lo), lo, 0.0),
            np.where(np.isfinite(hi), hi, 1.0))


def _panel_map(left, right, a, b, log_norm, nodes):
    """Points, log weights and widths of one panel, per row.

    Panels below 1/2 with a < 1 are integrated in t = x^a, panels above
    1/2 with b < 1 in s = (1 - x)^b; both maps turn the endpoint power of
    the density into a constant. Other panels are integrated in x.
    """
    lower = (a < 1.0) & (right <= 0.5)
    upper = (b < 1.0) & (left >= 0.5) & ~lower

    t_left = left ** a
    t_width = right ** a - t_left
    x_lower = (t_left + t_width * nodes) ** (1.0 / a)
    log_lower = (np.where(b == 1, 0.0, (b - 1) * np.log1p(-x_lower))
                 - np.log(a) - log_norm)

    s_left = (1.0 - right) ** b
    s_width = (1.0 - left) ** b - s_left
    y = (s_left + s_width * nodes) ** (1.0 / b)
    log_upper = (np.where(a == 1, 0.0, (a - 1) * np.log1p(-y))
                 - np.log(b) - log_norm)

    width = right - left
    x = left + width * nodes
    # nodes of the last panel may round to 1
    log_plain = (np.where(a == 1, 0.0, (a - 1) * np.log(x))
                 + np.where(b == 1, 0.0, (b - 1) * np.log1p(-x))
                 - log_norm)

    x = np.where(lower, x_lower, np.where(upper, 1.0 - y, x))
    log_density = np.where(lower, log_lower,
                           np.where(upper, log_upper, log_plain))
    width = np.where(lower, t_width, np.where(upper, s_width, width))
    return x, log_density, width


def beta_expectation(func, a, b, rule, breaks=()):
    """E[func(B)] for B ~ Beta(a, b).

    `a` and `b` may be arrays (one expectation per entry); `func` then
    receives the nodes as an array of shape (len(a), len(rule.nodes)) and
    must broadcast against it. The integral covers all of (0, 1), split
    at `breaks` (points in (0, 1) where func is not smooth), at
    GRADED_EDGES and at the EDGE_MASS quantiles of each density. Raises
    DomainError when a panel evaluates to a non-finite value.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.float64),
                               np.asarray(b, dtype=np.float64))
    scalar = a.ndim == 0
    a = np.atleast_1d(a).reshape(-1, 1)
    b = np.atleast_1d(b).reshape(-1, 1)
    _positive("a", a)
    _positive("b", b)

    log_norm = special.betaln(a, b)
    rows = a.shape[0]
    fixed = np.clip(np.array((0.0, 1.0) + tuple(breaks) + GRADED_EDGES,
                             dtype=np.float64), 0.0, 1.0)
    with np.errstate(divide='ignore', invalid='ignore', over='ignore',
                     under='ignore'):
        lo, hi = _support(a, b)
        edges = np.sort(np.hstack([np.broadcast_to(fixed, (rows, fixed.size)),
                                   lo, hi]), axis=1)

        total = np.zeros(rows)
        for k in range(edges.shape[1] - 1):
            left = edges[:, k:k + 1]
            right = edges[:, k + 1:k + 2]
            x, log_density, width = _panel_map(left, right, a, b, log_norm,
                                               rule.nodes)
            panel = np.sum(rule.weights * np.exp(log_density) * func(x),
                           axis=-1)
            width = width[:, 0]
            live = width > 0
            contribution = np.where(live, width * panel, 0.0)
            if not np.all(np.isfinite(contribution)):
                bad = int(np.argmin(np.isfinite(contribution)))
                raise DomainError(
                    "beta_expectation is not finite on (%g, %g) for "
                    "Beta(%g, %g)" % (left[bad, 0], right[bad, 0],
                                      a[bad, 0], b[bad, 0]))
            total += contribution
    return float(total[0]) if scalar else total


### Finite differences

def central_difference(func, x0, step, richardson=False):
    """Centered difference quotient of `func` at `x0`.

    With `richardson` the step-halved quotient is combined with the
    full-step one to cancel the O(step^2) term.
    """
    def quotient(h):
        return (func(x0 + h) - func(x0 - h)) / (2.0 * h)

    d = quotient(step)
    if richardson:
        d = (4.0 * quotient(step / 2.0) - d) / 3.0
    return d


### Sampling

def generator_for(seed, *keys):
    """A fresh numpy Generator for the stream named by `seed` and `keys`.

    The stream seed is mixed from (master_seed, stream_index, *keys) by
    numpy's SeedSequence hash, so streams never depend on the order in
    which they are requested.
    """
    if not isinstance(seed, SeedSpec):
        raise DomainError("seed must be a SeedSpec")
    sequence = np.random.SeedSequence(
        seed.master_seed, spawn_key=(seed.stream_index,) + tuple(keys))
    return np.random.Generator(np.random.PCG64(sequence))


def sample_chi2(df, seed, count):
    """`count` chi square draws with `df` degrees of freedom."""
    df = float(_positive("df", df))
    if isinstance(count, bool) or not isinstance(count, (int, np.integer)) \
       or count < 1:
        raise DomainError("count must be a positive integer")
    return generator_for(seed).chisquare(df, size=int(count))
