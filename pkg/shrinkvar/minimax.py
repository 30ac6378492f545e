"""The dominance threshold alpha*, dominance scans over noncentrality
grids, and numerical audits of the inequalities that establish
Delta >= 0 for 0 < alpha <= alpha*.

Notation: eps = 1/(1 + alpha), m_j = p + n + 2j, W_j = U_j/V and

    k_j(w) = (1 + w)^(-eps) ((m_j - alpha n/2)/(1 + w) - n).
"""

import logging
import math

import numpy as np
from scipy import optimize

from shrinkvar import numkernel as nk
from shrinkvar.core import (DOMINATES, INCONCLUSIVE, VIOLATION, DomainError,
                            NoRootError, ProofAudit, ScanReport,
                            TruncationError, as_array)
from shrinkvar.risk import delta_risk, delta_terms

logger = logging.getLogger(__name__)

# A ProofAudit passes when its worst margin is at least -MARGIN_TOL.
MARGIN_TOL = 1e-12

# Agreement required between closed form and quadrature moments.
MOMENT_TOL = 1e-10


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def _epsilon(alpha):
    if not alpha > 0:
        raise DomainError("alpha must be positive, got %r" % (alpha,))
    return 1.0 / (1.0 + alpha)


### Threshold

def alpha_star(dims):
    """alpha* = (-(n + 2) + sqrt((n + 2)^2 + 16 p))/(2 n).

    Evaluated as 8 p/(n ((n + 2) + sqrt((n + 2)^2 + 16 p))), which has no
    cancellation.
    """
    p, n = dims
    return 8.0 * p / (n * ((n + 2.0) + math.sqrt((n + 2.0) ** 2 + 16.0 * p)))


def maxmin_objective(kappa, dims):
    """min(1/kappa - 1, 4 p kappa/(n (n + 2 kappa))) for kappa in (0, 1)."""
    p, n = dims
    kappa = as_array(kappa)
    return _unwrap(np.minimum(1.0 / kappa - 1.0,
                              4.0 * p * kappa / (n * (n + 2.0 * kappa))))


def alpha_star_maxmin(dims, opt_tol=1e-9):
    """alpha* as the max over kappa of `maxmin_objective`.

    The first branch decreases from infinity to 0 and the second
    increases from 0, so the maximum sits at their crossing, which is
    bracketed on (0, 1) and solved for to within `opt_tol` in alpha.
    """
    if not 0 < opt_tol <= 1e-6:
        raise DomainError("opt_tol must lie in (0, 1e-6]")
    p, n = dims

    def gap(kappa):
        return (1.0 / kappa - 1.0) - 4.0 * p * kappa / (n * (n + 2.0 * kappa))

    # d(alpha)/d(kappa) = -1/kappa^2, and kappa > 1/(1 + alpha*) is far
    # from 0 for every problem of interest.
    kappa = optimize.brentq(gap, 1e-12, 1.0, xtol=opt_tol * 1e-4,
                            rtol=4 * np.finfo(float).eps)
    return 1.0 / kappa - 1.0


### Dominance scans

def dominance_scan(alpha, dims, tau_grid, cfg, violation_tol=1e-8):
    """Evaluate Delta on every tau of the grid and classify the result.

    Cells whose Poisson mixture cannot be truncated within the cap are
    recorded with a NaN value and an infinite error bound; they make an
    otherwise non-violating scan inconclusive.
    """
    tau_grid = [float(t) for t in tau_grid]
    if not tau_grid:
        raise DomainError("tau_grid must not be empty")
    if any(b < a for a, b in zip(tau_grid[:-1], tau_grid[1:])):
        raise DomainError("tau_grid must be sorted ascending")
    if not violation_tol > 0:
        raise DomainError("violation_tol must be positive")

    cells = []
    for tau in tau_grid:
        try:
            est = delta_risk(alpha, dims, tau, cfg)
        except TruncationError as e:
            logger.warning("Inconclusive cell tau=%g: %s", tau, e)
            cells.append((tau, math.nan, math.inf))
        else:
            cells.append((tau, est.value, est.error_bound))

    finite = [c for c in cells if math.isfinite(c[1])]
    if not finite:
        return ScanReport(cells, math.nan, math.nan, INCONCLUSIVE)
    argmin_tau, min_delta, error = min(finite, key=lambda c: c[1])
    if min_delta < -(violation_tol + error):
        verdict = VIOLATION
    elif min_delta >= -violation_tol and len(finite) == len(cells):
        verdict = DOMINATES
    else:
        verdict = INCONCLUSIVE
    logger.info("dominance_scan alpha=%g p=%d n=%d: min Delta %.6g at "
                "tau=%g, %s", alpha, dims.p, dims.n, min_delta, argmin_tau,
                verdict)
    return ScanReport(cells, min_delta, argmin_tau, verdict)


### k_j and its moments

def kj_value(j, w, alpha, dims):
    """k_j(w); at w = 0 this is p + 2j - alpha n/2."""
    eps = _epsilon(alpha)
    w = as_array(w)
    if np.any(w < 0):
        raise DomainError("w must be non-negative")
    m = dims.p + dims.n + 2.0 * j
    return _unwrap((1.0 + w) ** (-eps)
                   * ((m - alpha * dims.n / 2.0) / (1.0 + w) - dims.n))


def kj_root(j, alpha, dims, root_tol=1e-12):
    """The single zero w_j* = (p + 2j - alpha n/2)/n of k_j on (0, inf).

    The closed form is cross-checked against bisection on
    [0, 2 w_j* + 1], where k_j is positive at the left end and negative
    at the right end.
    """
    k0 = dims.p + 2.0 * j - alpha * dims.n / 2.0
    if not k0 > 0:
        raise NoRootError("k_%d(0) = %g is not positive" % (j, k0))
    w_star = k0 / dims.n
    w_bisect = optimize.bisect(lambda w: kj_value(j, w, alpha, dims),
                               0.0, 2.0 * w_star + 1.0, xtol=root_tol)
    if abs(w_bisect - w_star) > 10 * root_tol + 1e-12 * w_star:
        logger.warning("k_%d root: closed form %.17g, bisection %.17g",
                       j, w_star, w_bisect)
    return w_star


def _moment_parameters(j, alpha, dims):
    a = dims.p / 2.0 + j
    c = dims.n / 2.0
    slope = dims.p + dims.n + 2.0 * j - alpha * dims.n / 2.0
    return a, c, slope


def kj_moment_unnormalized(j, alpha, dims):
    """(m_j - alpha n/2) B(p/2 + j, n/2 + eps + 1) - n B(p/2 + j, n/2 + eps),
    the beta function form of the moment without its normaliser."""
    eps = _epsilon(alpha)
    a, c, slope = _moment_parameters(j, alpha, dims)
    return (slope * math.exp(nk.log_beta(a, c + eps + 1.0))
            - dims.n * math.exp(nk.log_beta(a, c + eps)))


def kj_moment(j, alpha, dims, cfg=None):
    """E[k_j(W_j)], the beta function form divided by B(p/2 + j, n/2).

    With 1/(1 + W_j) = 1 - B, B ~ Beta(p/2 + j, n/2), the moment is
    (m_j - alpha n/2) E[(1 - B)^(eps + 1)] - n E[(1 - B)^eps].
    `cfg` is accepted for symmetry with `kj_moment_quadrature`.
    """
    eps = _epsilon(alpha)
    a, c, slope = _moment_parameters(j, alpha, dims)
    norm = nk.log_beta(a, c)
    return (slope * math.exp(nk.log_beta(a, c + eps + 1.0) - norm)
            - dims.n * math.exp(nk.log_beta(a, c + eps) - norm))


def kj_moment_quadrature(j, alpha, dims, cfg):
    eps = _epsilon(alpha)
    a, c, slope = _moment_parameters(j, alpha, dims)
    return nk.beta_expectation(
        lambda b: (1.0 - b) ** eps * (slope * (1.0 - b) - dims.n),
        a, c, nk.quad_rule(cfg.order))


def kj_moment_lower_bound(j, alpha, dims):
    """The lower bound of E[k_j(W_j)] obtained by replacing j with 0 in
    the bracket:

        B(p/2 + j, n/2 + eps)/B(p/2 + j, n/2)
            * n (n + 2 eps)/(2 (p + n + 2 eps))
            * (4 p eps/(n (n + 2 eps)) - alpha).
    """
    eps = _epsilon(alpha)
    p, n = dims
    a, c, _ = _moment_parameters(j, alpha, dims)
    ratio = math.exp(nk.log_beta(a, c + eps) - nk.log_beta(a, c))
    return (ratio * n * (n + 2.0 * eps) / (2.0 * (p + n + 2.0 * eps))
            * bracket_factor(alpha, dims))


def bracket_factor(alpha, dims):
    """4 p eps/(n (n + 2 eps)) - alpha, zero at alpha = alpha*."""
    eps = _epsilon(alpha)
    p, n = dims
    return 4.0 * p * eps / (n * (n + 2.0 * eps)) - alpha


def delta_lower_bound(alpha, dims, j, cfg):
    """(alpha/n) E[(1 + W)^eps/(alpha + 1 + W) k_j(W)], the bound on
    Delta_j that follows from log(1 - x) >= -x - x^2/(2 (1 - x))."""
    _epsilon(alpha)
    j = np.asarray(j, dtype=np.float64)
    a, c, slope = _moment_parameters(j, alpha, dims)
    slope = np.reshape(slope, (-1, 1))
    e = nk.beta_expectation(
        lambda b: (1.0 - b) / (alpha + 1.0 - alpha * b)
        * (slope * (1.0 - b) - dims.n),
        a, c, nk.quad_rule(cfg.order))
    return _unwrap(alpha / dims.n * e)


def monotone_factor(alpha, w):
    """(1 + w)^eps/(alpha + 1 + w)."""
    eps = _epsilon(alpha)
    w = as_array(w)
    return _unwrap((1.0 + w) ** eps / (alpha + 1.0 + w))


def monotone_derivative(alpha, w):
    """d/dw log((1 + w)^eps/(alpha + 1 + w)) = -w (1 - eps)/((1 + w)(alpha + 1 + w))."""
    eps = _epsilon(alpha)
    w = as_array(w)
    return _unwrap(-w * (1.0 - eps) / ((1.0 + w) * (alpha + 1.0 + w)))


def final_margin(alpha, dims):
    """4 p/(n (n (alpha + 1) + 2)) - alpha, which equals `bracket_factor`."""
    p, n = dims
    return 4.0 * p / (n * (n * (alpha + 1.0) + 2.0)) - alpha


### Audits

def _audit(step, candidates):
    """ProofAudit from (margin, witness) pairs."""
    margin, witness = min(candidates, key=lambda c: c[0])
    passed = bool(margin >= -MARGIN_TOL)
    if passed:
        logger.debug("audit %s passed, worst margin %.3g", step, margin)
    else:
        logger.warning("audit %s failed, worst margin %.3g at %r",
                       step, margin, witness)
    return ProofAudit(step, passed, float(margin), witness)


def log_bound_margin(x):
    """log(1 - x) + x + x^2/(2 (1 - x)), non-negative on (0, 1)."""
    x = as_array(x)
    return _unwrap(np.log1p(-x) + x + x * x / (2.0 * (1.0 - x)))


def audit_log_bound(x_grid, alpha=None, w_grid=None):
    """Audit log(1 - x) >= -x - x^2/(2 (1 - x)) on `x_grid`.

    When `alpha` and `w_grid` are given the bound is also audited in its
    substituted form x = alpha/(alpha + 1 + w), where x/(1 - x) must
    equal alpha/(1 + w).
    """
    x = as_array(x_grid)
    if x.size == 0 or np.any((x <= 0) | (x >= 1)):
        raise DomainError("x_grid values must lie in (0, 1)")
    margins = np.atleast_1d(log_bound_margin(x))
    i = int(np.argmin(margins))
    candidates = [(margins[i], ('x', float(x.flat[i])))]
    if alpha is not None and w_grid is not None:
        w = np.atleast_1d(as_array(w_grid))
        xs = alpha / (alpha + 1.0 + w)
        ratio_error = np.abs(xs / (1.0 - xs) - alpha / (1.0 + w)) \
            / (alpha / (1.0 + w))
        sub = np.log1p(-xs) + xs + 0.5 * (alpha / (1.0 + w)) * xs
        k = int(np.argmin(sub))
        candidates.append((sub[k], ('w', float(w[k]))))
        k = int(np.argmax(ratio_error))
        candidates.append((MARGIN_TOL - ratio_error[k], ('ratio', float(w[k]))))
    return _audit('log_bound', candidates)


def audit_monotone(alpha, w_grid, fd_tol=1e-6):
    """Audit that log((1 + w)^eps/(alpha + 1 + w)) is non-increasing.

    The margin at each w is minus the analytic derivative. The analytic
    derivative is compared with a centered difference; a disagreement
    beyond `fd_tol` enters the audit as a negative margin.
    """
    eps = _epsilon(alpha)
    w = np.atleast_1d(as_array(w_grid))
    if w.size == 0 or np.any(w < 0):
        raise DomainError("w_grid values must be non-negative")
    deriv = np.atleast_1d(monotone_derivative(alpha, w))

    def log_factor(x):
        return eps * np.log1p(x) - np.log(alpha + 1.0 + x)

    fd = nk.central_difference(log_factor, w, 1e-5 * np.maximum(1.0, w))
    excess = np.abs(fd - deriv) - fd_tol

    i = int(np.argmin(-deriv))
    candidates = [(-deriv[i], ('w', float(w[i])))]
    k = int(np.argmax(excess))
    if excess[k] > 0:
        candidates.append((-excess[k], ('finite_difference', float(w[k]))))
    return _audit('monotone', candidates)


def audit_kj_sign(alpha, dims, js, points=1000):
    """Audit that k_j is positive on [0, w_j*) and negative on
    (w_j*, 100 w_j*] at `points` grid points, for every j in `js`."""
    candidates = []
    for j in js:
        k0 = dims.p + 2.0 * j - alpha * dims.n / 2.0
        if not k0 > 0:
            candidates.append((k0, ('k0', j)))
            continue
        w_star = kj_root(j, alpha, dims)
        w = np.linspace(0.0, 100.0 * w_star, points)
        w = w[np.abs(w - w_star) > 1e-9 * w_star]
        k = np.atleast_1d(kj_value(j, w, alpha, dims))
        margins = np.where(w < w_star, k, -k)
        i = int(np.argmin(margins))
        candidates.append((margins[i], ('j', j, 'w', float(w[i]))))
    return _audit('kj_sign', candidates)


def audit_kj_moment(alpha, dims, js, cfg):
    """Audit the moment chain E[k_j] >= lower bound >= 0 for every j in
    `js`, and the agreement of the closed form with quadrature."""
    candidates = []
    for j in js:
        closed = kj_moment(j, alpha, dims)
        bound = kj_moment_lower_bound(j, alpha, dims)
        candidates.append((closed - bound, ('chain', j)))
        candidates.append((bound, ('bound', j)))
        excess = abs(closed - kj_moment_quadrature(j, alpha, dims, cfg)) \
            - MOMENT_TOL
        if excess > 0:
            candidates.append((-excess, ('quadrature', j)))
    return _audit('kj_moment', candidates)


def audit_final_inequality(alpha, dims):
    """Audit 4 p eps/(n (n + 2 eps)) - alpha >= 0.

    The audit also requires the margin to turn negative at 1.01 alpha*,
    i.e. that the bound is tight at alpha*.
    """
    _epsilon(alpha)
    margin = final_margin(alpha, dims)
    candidates = [(margin, ('alpha', alpha, 'p', dims.p, 'n', dims.n))]
    above = 1.01 * alpha_star(dims)
    tight = final_margin(above, dims)
    if not tight < 0:
        candidates.append((-tight - MARGIN_TOL * 2, ('tightness', above)))
    return _audit('final_ineq', candidates)


def audit_delta_chain(alpha, dims, js, cfg):
    """Audit, per mixture index, Delta_j >= lower_j >= bound_j >= 0 where
    lower_j is `delta_lower_bound` and bound_j replaces the monotone
    factor by its value at w_j*."""
    js = list(js)
    rule = nk.quad_rule(cfg.order)
    deltas = np.atleast_1d(delta_terms(alpha, dims, js, rule))
    lowers = np.atleast_1d(delta_lower_bound(alpha, dims, js, cfg))
    candidates = []
    for j, d, lower in zip(js, deltas, lowers):
        candidates.append((d - lower, ('log_bound', j)))
        try:
            w_star = kj_root(j, alpha, dims)
        except NoRootError:
            candidates.append((dims.p + 2.0 * j - alpha * dims.n / 2.0,
                               ('k0', j)))
            continue
        bound = alpha / dims.n * monotone_factor(alpha, w_star) \
            * kj_moment(j, alpha, dims)
        candidates.append((lower - bound, ('monotone', j)))
        candidates.append((bound, ('moment', j)))
    return _audit('delta_chain', candidates)
