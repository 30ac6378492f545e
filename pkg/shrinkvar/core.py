"""!
The main file with the class definitions

Core
==============

This file contains the value classes shared by every module of
shrinkvar, the exception hierarchy, and the parser for noncentrality
grid specifiers.
"""

import collections
import math
import numbers
import re

import numpy as np


### Errors

class ShrinkvarError(Exception):
    """Base class of every error raised by shrinkvar."""


class DomainError(ShrinkvarError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NoRootError(DomainError):
    """k_j has no sign change on (0, inf) because k_j(0) <= 0."""


class ConfigError(ShrinkvarError, ValueError):
    """An option is unknown or its value cannot be interpreted."""


class TruncationError(ShrinkvarError, RuntimeError):
    """The Poisson mixture needs more terms than the configured cap."""

    def __init__(self, message, j_max, j_cap):
        super(TruncationError, self).__init__(message)
        self.j_max = j_max
        self.j_cap = j_cap


def _is_count(x):
    return isinstance(x, numbers.Integral) and not isinstance(x, bool)


def _is_real(x):
    return isinstance(x, numbers.Real) and not isinstance(x, bool) \
        and math.isfinite(x)


### Problem and estimator description

class ProblemDims(collections.namedtuple('ProblemDims', ['p', 'n'])):
    """Dimensions of the sampling model.

        :param int p: Dimension of the normal vector X
        :param int n: Degrees of freedom of the chi square variable S
    """
    __slots__ = ()

    def __new__(cls, p, n):
        if not (_is_count(p) and _is_count(n)) or p < 1 or n < 1:
            raise DomainError(
                "p and n must be positive integers, got p=%r, n=%r" % (p, n))
        return super(ProblemDims, cls).__new__(cls, int(p), int(n))


class Noncentrality(collections.namedtuple('Noncentrality', ['tau'])):
    """The noncentrality tau = |theta|^2 / sigma^2, the only functional of
    (theta, sigma^2) that the risk of a scale equivariant estimator
    depends on."""
    __slots__ = ()

    def __new__(cls, tau):
        if not _is_real(tau) or tau < 0:
            raise DomainError("tau must be a finite non-negative real, got %r"
                              % (tau,))
        return super(Noncentrality, cls).__new__(cls, float(tau))

    @property
    def rate(self):
        """Rate of the Poisson mixing variable J."""
        return self.tau / 2.0


def as_noncentrality(tau):
    if isinstance(tau, Noncentrality):
        return tau
    return Noncentrality(tau)


BEST_EQUIVARIANT = 'best-equivariant'
STEIN_TRUNCATED = 'stein'
SIMPLE_BAYES = 'simple-bayes'

FAMILIES = (BEST_EQUIVARIANT, STEIN_TRUNCATED, SIMPLE_BAYES)


class EstimatorSpec(collections.namedtuple('EstimatorSpec',
                                           ['family', 'alpha'])):
    """Choice of phi in the scale equivariant class (1 - phi(W)) S/n.

        :param str family: One of `best-equivariant`, `stein` or
                           `simple-bayes`
        :param float alpha: Shrinkage constant, required by (and only
                            allowed for) `simple-bayes`
    """
    __slots__ = ()

    def __new__(cls, family, alpha=None):
        if family not in FAMILIES:
            raise DomainError("Unknown estimator family %r" % (family,))
        if family == SIMPLE_BAYES:
            if not _is_real(alpha) or alpha <= 0:
                raise DomainError(
                    "simple-bayes needs a positive alpha, got %r" % (alpha,))
            alpha = float(alpha)
        elif alpha is not None:
            raise DomainError("%s takes no alpha" % family)
        return super(EstimatorSpec, cls).__new__(cls, family, alpha)

    @classmethod
    def best_equivariant(cls):
        return cls(BEST_EQUIVARIANT)

    @classmethod
    def stein(cls):
        return cls(STEIN_TRUNCATED)

    @classmethod
    def simple_bayes(cls, alpha):
        return cls(SIMPLE_BAYES, alpha)


class PriorHyper(collections.namedtuple('PriorHyper', ['a', 'dims'])):
    """Hyperparameter of the hierarchical prior on (theta, eta).

    The lambda density is proportional to lambda^a (1-lambda)^(n/2-1) and
    the eta density to eta^a. The marginal converges only when
    p/2 + a + 1 > 0.
    """
    __slots__ = ()

    def __new__(cls, a, dims):
        if not isinstance(dims, ProblemDims):
            raise DomainError("dims must be a ProblemDims instance")
        if not _is_real(a):
            raise DomainError("a must be a finite real, got %r" % (a,))
        if dims.p / 2.0 + a + 1.0 <= 0:
            raise DomainError(
                "p/2 + a + 1 must be positive, got p=%d, a=%r" % (dims.p, a))
        return super(PriorHyper, cls).__new__(cls, float(a), dims)


### Numerical configuration

class SeedSpec(collections.namedtuple('SeedSpec',
                                      ['master_seed', 'stream_index'])):
    """Identifies one reproducible random stream."""
    __slots__ = ()

    def __new__(cls, master_seed, stream_index=0):
        if not _is_count(master_seed) or not 0 <= master_seed < 2 ** 64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        if not _is_count(stream_index) or stream_index < 0:
            raise DomainError("stream_index must be a non-negative integer")
        return super(SeedSpec, cls).__new__(cls, int(master_seed),
                                            int(stream_index))


QuadRule = collections.namedtuple('QuadRule', ['nodes', 'weights'])

PoissonTruncation = collections.namedtuple(
    'PoissonTruncation', ['rate', 'weights', 'j_max', 'tail_mass'])


class QuadConfig(collections.namedtuple('QuadConfig',
                                        ['order', 'tail_tol', 'j_cap'])):
    """Settings of the quadrature risk engine.

        :param int order: Number of Gauss-Legendre points per panel
        :param float tail_tol: Poisson mass allowed to be dropped
        :param int j_cap: Largest number of mixture terms allowed
    """
    __slots__ = ()

    def __new__(cls, order=128, tail_tol=1e-12, j_cap=20000):
        if not _is_count(order) or not 16 <= order <= 1024:
            raise DomainError("order must be an integer in [16, 1024]")
        if not _is_real(tail_tol) or not 0 < tail_tol <= 1e-8:
            raise DomainError("tail_tol must lie in (0, 1e-8]")
        if not _is_count(j_cap) or j_cap < 50:
            raise DomainError("j_cap must be an integer >= 50")
        return super(QuadConfig, cls).__new__(cls, int(order),
                                              float(tail_tol), int(j_cap))


class McConfig(collections.namedtuple('McConfig',
                                      ['samples', 'seed', 'crn'])):
    """Settings of the Monte Carlo risk engine.

    With `crn` true every estimator evaluated under the same seed sees
    the same (J, U, V) draws.
    """
    __slots__ = ()

    def __new__(cls, samples, seed, crn=True):
        if not _is_count(samples) or samples < 1000:
            raise DomainError("samples must be an integer >= 1000")
        if not isinstance(seed, SeedSpec):
            raise DomainError("seed must be a SeedSpec")
        return super(McConfig, cls).__new__(cls, int(samples), seed,
                                            bool(crn))


### Results

QUADRATURE = 'quadrature'
MONTE_CARLO = 'monte_carlo'

RiskEstimate = collections.namedtuple(
    'RiskEstimate', ['value', 'error_bound', 'method', 'j_max_used'])

DOMINATES = 'dominates'
VIOLATION = 'violation'
INCONCLUSIVE = 'inconclusive'

ScanReport = collections.namedtuple(
    'ScanReport', ['cells', 'min_delta', 'argmin_tau', 'verdict'])

AUDIT_STEPS = ('log_bound', 'monotone', 'kj_sign', 'kj_moment',
               'final_ineq', 'delta_chain')

ProofAudit = collections.namedtuple(
    'ProofAudit', ['step', 'passed', 'worst_margin', 'witness'])

MarginalCheck = collections.namedtuple(
    'MarginalCheck', ['points', 'ratios', 'max_rel_spread'])

PosteriorCheck = collections.namedtuple(
    'PosteriorCheck',
    ['shrink_numeric', 'shrink_closed', 'sigma2_numeric', 'sigma2_closed'])


### Noncentrality grids

DEFAULT_TAU_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0)

range_rx = re.compile(r'^\s*([^:,]+):([^:,]+):([^:,]+)\s*$')


def parse_tau_grid(string):
    """Interpret a noncentrality grid specifier.

    The specifier is either `start:stop:step`, which includes `stop`
    when it is reached to within a small fraction of `step`, or a comma
    separated list of values. The grid must be non-empty, non-negative
    and ascending.
    """
    m = re.match(range_rx, string)
    try:
        if m:
            start, stop, step = [float(g) for g in m.groups()]
        else:
            grid = [float(v) for v in string.split(',') if v.strip()]
    except ValueError:
        raise ConfigError("Cannot interpret tau grid %r" % string)
    if m:
        if not step > 0 or not stop >= start:
            raise ConfigError("Bad grid range %r" % string)
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [start + i * step for i in range(count)]
    if not grid:
        raise ConfigError("Empty tau grid %r" % string)
    if any(not math.isfinite(t) or t < 0 for t in grid):
        raise ConfigError("tau values must be finite and non-negative")
    if any(b < a for a, b in zip(grid[:-1], grid[1:])):
        raise ConfigError("tau grid must be sorted ascending")
    return grid


def format_tau_grid(grid):
    return ','.join(repr(float(t)) for t in grid)


def as_array(x):
    return np.asarray(x, dtype=np.float64)
