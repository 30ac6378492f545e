"""Configuration handling and the programmatic entry points behind the
command line.

A run is described by a RawConfigParser with the sections listed in
`sections`. `default_configuration` fills every default, an optional
configuration file is read over it, and keyword options (the command
line flags) are merged last with `merge_config`. The `run_*` functions
take that configuration and return a `Report`.
"""

import configparser
import logging
import math
import os.path as p

import numpy as np

from shrinkvar import bayesverify, minimax, numkernel as nk, risk
from shrinkvar.core import (DOMINATES, INCONCLUSIVE, SIMPLE_BAYES,
                            ConfigError, DomainError, EstimatorSpec, McConfig,
                            PriorHyper, ProblemDims, QuadConfig, SeedSpec,
                            TruncationError, format_tau_grid, parse_tau_grid)
from shrinkvar.model import alpha_from_hyper
from shrinkvar.output import Report, write_csv, write_plot_data
from shrinkvar.utils import working_directory

logger = logging.getLogger(__name__)

sections = ["problem", "quadrature", "montecarlo", "scan", "verify",
            "output"]

section_map = {
    "p"             : "problem",
    "n"             : "problem",
    "alpha"         : "problem",
    "alpha_frac"    : "problem",
    "a"             : "problem",
    "estimator"     : "problem",
    "nodes"         : "quadrature",
    "tail_tol"      : "quadrature",
    "j_cap"         : "quadrature",
    "samples"       : "montecarlo",
    "seed"          : "montecarlo",
    "stream"        : "montecarlo",
    "crn"           : "montecarlo",
    "tau_grid"      : "scan",
    "violation_tol" : "scan",
    "method"        : "scan",
    "fd_step"       : "verify",
    "opt_tol"       : "verify",
    "root_tol"      : "verify",
    "points"        : "verify",
    "point_seed"    : "verify",
    "format"        : "output",
}

defaults = [
    ("nodes", "128"),
    ("tail_tol", "1e-12"),
    ("j_cap", "20000"),
    ("samples", "1000000"),
    ("seed", "20240601"),
    ("stream", "0"),
    ("crn", "yes"),
    ("tau_grid", format_tau_grid([0, 0.25, 0.5, 1, 2, 5, 10, 25, 50, 100])),
    ("violation_tol", "1e-8"),
    ("method", "quad"),
    ("fd_step", "1e-5"),
    ("opt_tol", "1e-9"),
    ("root_tol", "1e-12"),
    ("points", "20"),
    ("point_seed", "7"),
    ("format", "csv"),
]

METHODS = ("quad", "mc")
FORMATS = ("csv", "json")

# Problem cells of the report and of `verify` runs without --p/--n.
REPORT_CELLS = [(1, 1), (3, 5), (4, 2), (10, 10)]
BAYES_CELLS = [(4, 2, -2.0), (3, 5, 0.0), (10, 10, 1.0)]

# Mixture indices audited by the proof suite.
AUDIT_INDICES = range(0, 51)


def default_configuration():
    """Configuration defaults before reading a configuration file.

    The configuration is represented as a configparser.RawConfigParser
    instance."""
    config = configparser.RawConfigParser()
    config.optionxform = str
    for section in sections:
        config.add_section(section)
    for name, value in defaults:
        config.set(section_map[name], name, value)
    return config


def merge_config(config, options):
    """Merge the options given in the `options` dict into the
    RawConfigParser instance `config`.

    Options whose value is None are skipped. Mutates the given config
    instance."""
    for k, v in options.items():
        if k not in section_map:
            raise ConfigError("Unrecognized option %r" % (k,))
        if v is None:
            continue
        if v is True:
            v = "yes"
        elif v is False:
            v = "no"
        elif isinstance(v, float):
            v = repr(v)
        config.set(section_map[k], k, str(v))


def read_config(config, path):
    """Read the configuration file at `path` over `config`, rejecting
    unknown sections and options."""
    if not p.exists(path):
        raise OSError("Configuration file %s does not exist" % path)
    try:
        config.read(path)
    except configparser.Error as e:
        raise ConfigError("Cannot parse %s: %s" % (path, e))
    for section in config.sections():
        if section not in sections:
            raise ConfigError("Unexpected section %r in %s" % (section, path))
        for name in config.options(section):
            if section_map.get(name) != section:
                raise ConfigError("Unrecognized option %s.%s in %s"
                                  % (section, name, path))


def build_configuration(config_path=None, **options):
    config = default_configuration()
    if config_path is not None:
        read_config(config, config_path)
    merge_config(config, options)
    return config


### Typed accessors

def _get(config, name, convert=str, required=True):
    section = section_map[name]
    if not config.has_option(section, name):
        if required:
            raise ConfigError("Option %s.%s is required" % (section, name))
        return None
    value = config.get(section, name)
    try:
        return convert(value)
    except ValueError:
        raise ConfigError("Cannot interpret %s.%s = %r"
                          % (section, name, value))


def _boolean(value):
    lowered = value.strip().lower()
    if lowered not in configparser.RawConfigParser.BOOLEAN_STATES:
        raise ValueError(value)
    return configparser.RawConfigParser.BOOLEAN_STATES[lowered]


def has_problem(config):
    return config.has_option("problem", "p") \
        or config.has_option("problem", "n")


def problem_dims(config):
    return ProblemDims(_get(config, "p", int), _get(config, "n", int))


def quad_config(config):
    return QuadConfig(_get(config, "nodes", int),
                      _get(config, "tail_tol", float),
                      _get(config, "j_cap", int))


def mc_config(config, cell=0):
    """Monte Carlo settings; each grid cell draws from its own stream."""
    seed = SeedSpec(_get(config, "seed", int),
                    _get(config, "stream", int) + cell)
    return McConfig(_get(config, "samples", int), seed,
                    _get(config, "crn", _boolean))


def tau_grid(config):
    return parse_tau_grid(_get(config, "tau_grid"))


def method(config):
    value = _get(config, "method")
    if value not in METHODS:
        raise ConfigError("method must be one of %s, got %r"
                          % (", ".join(METHODS), value))
    return value


def output_format(config):
    value = _get(config, "format")
    if value not in FORMATS:
        raise ConfigError("format must be one of %s, got %r"
                          % (", ".join(FORMATS), value))
    return value


def resolve_alpha(config, dims):
    """alpha from `alpha`, else `alpha_frac` times alpha*, else from the
    prior hyperparameter `a`, else alpha* itself."""
    alpha = _get(config, "alpha", float, required=False)
    if alpha is None:
        frac = _get(config, "alpha_frac", float, required=False)
        if frac is not None:
            alpha = frac * minimax.alpha_star(dims)
        elif config.has_option("problem", "a"):
            alpha = alpha_from_hyper(PriorHyper(_get(config, "a", float),
                                                dims))
        else:
            alpha = minimax.alpha_star(dims)
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError("alpha must be positive, got %r" % (alpha,))
    return alpha


def prior_hyper(config, dims):
    """The prior hyperparameter `a`, or the one inducing the configured
    alpha through alpha = (p/2 + a + 1)/(n/2)."""
    a = _get(config, "a", float, required=False)
    if a is None:
        alpha = resolve_alpha(config, dims)
        a = alpha * dims.n / 2.0 - dims.p / 2.0 - 1.0
    return PriorHyper(a, dims)


def estimator_spec(config, dims):
    family = _get(config, "estimator", required=False) or SIMPLE_BAYES
    if family == SIMPLE_BAYES:
        return EstimatorSpec(family, resolve_alpha(config, dims))
    for name in ("alpha", "alpha_frac", "a"):
        if config.has_option(section_map[name], name):
            raise ConfigError("Option %s.%s only applies to the %s estimator,"
                              " not %s" % (section_map[name], name,
                                           SIMPLE_BAYES, family))
    try:
        return EstimatorSpec(family)
    except DomainError as e:
        raise ConfigError(str(e))


### Threshold

def run_alpha_star(config):
    dims = problem_dims(config)
    value = minimax.alpha_star(dims)
    logger.info("alpha*(p=%d, n=%d) = %.17g", dims.p, dims.n, value)
    return value


### Risk curves

RISK_COLUMNS = ["tau", "risk", "error_bound", "method"]


def risk_rows(spec, dims, taus, config):
    """Rows of a risk table, computed until the engine fails.

    Returns the rows and the TruncationError that stopped the
    computation, if any."""
    rows = []
    use_mc = method(config) == "mc"
    cfg = None if use_mc else quad_config(config)
    for i, tau in enumerate(taus):
        try:
            if use_mc:
                est = risk.risk_mc(spec, dims, tau, mc_config(config, i))
            else:
                est = risk.risk_exact(spec, dims, tau, cfg)
        except TruncationError as e:
            logger.warning("risk stopped at tau=%g: %s", tau, e)
            return rows, e
        rows.append((tau, est.value, est.error_bound, est.method))
    return rows, None


def run_risk(config):
    """Risk curve of the configured estimator over the tau grid."""
    dims = problem_dims(config)
    spec = estimator_spec(config, dims)
    rows, error = risk_rows(spec, dims, tau_grid(config), config)
    report = Report(config, "risk")
    report.add_table("risk", RISK_COLUMNS, rows)
    if error is not None:
        report.add_verdict("risk", "risk_exact", False, status="truncated",
                           witness=[error.j_max, error.j_cap])
    return report


### Dominance

def _add_scan(report, scan, name="dominance"):
    report.add_table(name, ["tau", "delta", "error_bound"], scan.cells)
    report.add_verdict(name, "dominance_scan", scan.verdict == DOMINATES,
                       margin=scan.min_delta, status=scan.verdict,
                       witness=[scan.argmin_tau])


def run_dominance(config):
    """Scan of Delta over the tau grid at the configured alpha."""
    dims = problem_dims(config)
    alpha = resolve_alpha(config, dims)
    scan = minimax.dominance_scan(alpha, dims, tau_grid(config),
                                  quad_config(config),
                                  _get(config, "violation_tol", float))
    report = Report(config, "dominance")
    _add_scan(report, scan)
    return report


### Verification suites

SUITES = ("bayes", "proof", "all")


def _worst(errors):
    """Index and value of the largest error; NaN counts as infinite."""
    errors = np.asarray(errors, dtype=np.float64)
    errors = np.where(np.isnan(errors), np.inf, errors)
    i = int(np.argmax(errors))
    return i, float(errors[i])


def _relative_error(value, reference):
    """|value - reference|/|reference|, infinite when either side is not
    finite or the reference is zero."""
    if not (math.isfinite(value) and math.isfinite(reference)) \
       or reference == 0:
        return math.inf
    return abs(value - reference) / abs(reference)


def proof_suite(alpha, dims, config, report, prefix=""):
    """Run every proof audit for one problem cell into `report`."""
    cfg = quad_config(config)
    opt_tol = _get(config, "opt_tol", float)
    star = minimax.alpha_star(dims)
    maxmin = minimax.alpha_star_maxmin(dims, opt_tol)
    report.add_verdict(prefix + "threshold", "alpha_star_maxmin",
                       abs(star - maxmin) <= 1e-8,
                       margin=1e-8 - abs(star - maxmin), witness=[star, maxmin])

    x_grid = np.linspace(0.001, 0.999, 999)
    w_grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 200)])
    report.add_audit(prefix + "log_bound", minimax.audit_log_bound(
        x_grid, alpha, w_grid))
    report.add_audit(prefix + "monotone",
                     minimax.audit_monotone(alpha, w_grid))
    report.add_audit(prefix + "kj_sign",
                     minimax.audit_kj_sign(alpha, dims, AUDIT_INDICES))
    report.add_audit(prefix + "kj_moment",
                     minimax.audit_kj_moment(alpha, dims, AUDIT_INDICES, cfg))
    report.add_audit(prefix + "final_ineq",
                     minimax.audit_final_inequality(alpha, dims))
    report.add_audit(prefix + "delta_chain",
                     minimax.audit_delta_chain(alpha, dims, AUDIT_INDICES, cfg))


def bayes_suite(h, config, report, prefix=""):
    """Run the marginal, gradient, posterior and identity checks for one
    prior into `report`."""
    cfg = quad_config(config)
    fd_step = _get(config, "fd_step", float)
    count = _get(config, "points", int)
    if count < 2:
        raise ConfigError("verify.points must be at least 2")
    rng = nk.generator_for(SeedSpec(_get(config, "point_seed", int)),
                           h.dims.p, h.dims.n)
    points = bayesverify.random_points(rng, count)

    check = bayesverify.marginal_ratio_check(points, h, cfg)
    report.add_table(prefix + "marginal", ["x_sq", "s", "ratio"],
                     [(x, s, r) for (x, s), r in zip(check.points,
                                                     check.ratios)])
    report.add_verdict(prefix + "marginal_ratio", "marginal_ratio_check",
                       check.max_rel_spread <= 1e-6,
                       margin=1e-6 - check.max_rel_spread)

    worst, err = _worst([max(bayesverify.gradient_identity_check(x, s, h,
                                                                 fd_step))
                         for x, s in points])
    report.add_verdict(prefix + "gradient", "gradient_identity_check",
                       err <= 1e-8, margin=1e-8 - err,
                       witness=list(points[worst]))

    rows = []
    for x, s in points[:10]:
        post = bayesverify.posterior_estimates_numeric(x, s, h, cfg, fd_step)
        rows.append((x, s) + tuple(post))
    report.add_table(prefix + "posterior",
                     ["x_sq", "s", "shrink_numeric", "shrink_closed",
                      "sigma2_numeric", "sigma2_closed"], rows)
    worst, err = _worst([max(_relative_error(r[2], r[3]),
                             _relative_error(r[4], r[5])) for r in rows])
    report.add_verdict(prefix + "posterior", "posterior_estimates_numeric",
                       err <= 1e-5, margin=1e-5 - err,
                       witness=list(rows[worst][:2]))

    cov = []
    for alpha_e, beta_e, gamma_e, w in zip(rng.uniform(-0.5, 3.0, count),
                                           rng.uniform(-0.5, 3.0, count),
                                           rng.uniform(0.0, 5.0, count),
                                           rng.uniform(0.0, 10.0, count)):
        try:
            left, right = bayesverify.beta_cov_identity(alpha_e, beta_e,
                                                        gamma_e, w, cfg)
            error = _relative_error(right, left)
        except DomainError as e:
            logger.warning("beta_cov_identity failed: %s", e)
            error = math.inf
        cov.append((error, [alpha_e, beta_e, gamma_e, w]))
    worst, err = _worst([c[0] for c in cov])
    witness = cov[worst][1]
    report.add_verdict(prefix + "beta_cov_identity", "beta_cov_identity",
                       err <= 1e-10, margin=1e-10 - err, witness=witness)

    residuals = []
    for _ in range(count):
        x = rng.normal(size=h.dims.p)
        theta = rng.normal(size=h.dims.p)
        lam = rng.uniform(0.01, 0.99)
        residuals.append(
            bayesverify.completing_square_residual(x, theta, lam))
    _, err = _worst(residuals)
    report.add_verdict(prefix + "completing_square",
                       "completing_square_residual", err <= 1e-12,
                       margin=1e-12 - err)


def run_verify(config, suite="all"):
    """Run the `bayes` and/or `proof` suites.

    With --p/--n the suites run on that single cell; otherwise the proof
    suite covers REPORT_CELLS at alpha* and the Bayes suite covers
    BAYES_CELLS."""
    if suite not in SUITES:
        raise ConfigError("suite must be one of %s" % ", ".join(SUITES))
    report = Report(config, "verify " + suite)
    single = has_problem(config)
    if suite in ("proof", "all"):
        if single:
            dims = problem_dims(config)
            proof_suite(resolve_alpha(config, dims), dims, config, report)
        else:
            for cell in REPORT_CELLS:
                dims = ProblemDims(*cell)
                proof_suite(minimax.alpha_star(dims), dims, config, report,
                            "p%d_n%d/" % cell)
    if suite in ("bayes", "all"):
        if single:
            dims = problem_dims(config)
            bayes_suite(prior_hyper(config, dims), config, report)
        else:
            for p_, n_, a in BAYES_CELLS:
                bayes_suite(PriorHyper(a, ProblemDims(p_, n_)), config,
                            report, "p%d_n%d_a%g/" % (p_, n_, a))
    for failure in report.failures():
        logger.warning("check %s failed: margin %r, witness %r",
                       failure["name"], failure["margin"], failure["witness"])
    return report


### Report

def cell_name(dims):
    return "p%d_n%d" % (dims.p, dims.n)


def run_report(config, out_dir):
    """Write the acceptance report into `out_dir`.

    For every cell of REPORT_CELLS: risk curves of the three estimator
    families over the tau grid (`risk_<cell>_<family>.csv`) and the
    Delta curve at alpha* (`delta_<cell>.dat`). The verdicts of the
    dominance scans and of the verification suites go to `report.json`.
    Returns the report.
    """
    taus = tau_grid(config)
    cfg = quad_config(config)
    violation_tol = _get(config, "violation_tol", float)
    report = Report(config, "report")
    with working_directory(out_dir):
        for cell in REPORT_CELLS:
            dims = ProblemDims(*cell)
            name = cell_name(dims)
            alpha = minimax.alpha_star(dims)
            extra = [("p", dims.p), ("n", dims.n), ("alpha", alpha)]
            for spec in (EstimatorSpec.best_equivariant(),
                         EstimatorSpec.stein(),
                         EstimatorSpec.simple_bayes(alpha)):
                rows, error = risk_rows(spec, dims, taus, config)
                with open("risk_%s_%s.csv" % (name, spec.family), "w",
                          newline="") as f:
                    write_csv(f, RISK_COLUMNS, rows, config,
                              extra + [("estimator", spec.family)])
                if error is not None:
                    report.add_verdict("%s/risk_%s" % (name, spec.family),
                                       "risk_exact", False,
                                       status="truncated")
            scan = minimax.dominance_scan(alpha, dims, taus, cfg,
                                          violation_tol)
            _add_scan(report, scan, "%s/dominance" % name)
            with open("delta_%s.dat" % name, "w", newline="") as f:
                write_plot_data(f, [c[0] for c in scan.cells],
                                [c[1] for c in scan.cells], config,
                                ("tau", "delta"), extra)
        report.extend(run_verify(config, "all"))
        with open("report.json", "w", newline="") as f:
            report.to_json(f)
    return report


def verdict_message(report):
    """One line per failed or inconclusive check."""
    lines = []
    for v in report.failures():
        if v["status"] == INCONCLUSIVE:
            lines.append("inconclusive: %s (%s)" % (v["name"], v["operation"]))
        else:
            lines.append("%s: %s (%s) margin=%r witness=%r"
                         % (v["status"], v["name"], v["operation"],
                            v["margin"], v["witness"]))
    return lines
