"""Command line front end.

    shrinkvar alpha-star --p 4 --n 2
    shrinkvar risk --estimator stein --p 4 --n 2 --tau-grid 0:10:1
    shrinkvar dominance --p 4 --n 2 --alpha-frac 0.5
    shrinkvar verify proof --p 4 --n 2
    shrinkvar report --out report/

Exit codes: 0 when every check passes, 1 when a check fails or is
inconclusive, 2 on invalid invocation or I/O failure.
"""

import argparse
import logging
import sys

from shrinkvar import __version__, driver
from shrinkvar.core import FAMILIES, ConfigError, DomainError, ShrinkvarError
from shrinkvar.output import write_csv
from shrinkvar.utils import output_stream

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _add_problem_arguments(parser, estimator=False):
    parser.add_argument("--p", type=int, help="dimension of X")
    parser.add_argument("--n", type=int, help="degrees of freedom of S")
    if estimator:
        parser.add_argument("--estimator", choices=FAMILIES)
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--alpha", type=float,
                       help="shrinkage constant of the simple Bayes estimator")
    group.add_argument("--alpha-frac", dest="alpha_frac", type=float,
                       help="alpha as a fraction of alpha*")
    group.add_argument("--a", type=float, help="prior hyperparameter")


def _add_engine_arguments(parser):
    parser.add_argument("--tau-grid", dest="tau_grid",
                        help="start:stop:step or comma separated values")
    parser.add_argument("--nodes", type=int,
                        help="Gauss-Legendre points per panel")
    parser.add_argument("--tail-tol", dest="tail_tol", type=float,
                        help="Poisson mass allowed to be dropped")
    parser.add_argument("--j-cap", dest="j_cap", type=int,
                        help="largest number of Poisson mixture terms")


def _add_common_arguments(parser):
    parser.add_argument("--config", help="configuration file read before "
                        "the flags")
    parser.add_argument("--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shrinkvar",
        description="Risk, dominance and Bayes checks for the simple "
                    "Bayes estimator of a normal variance.")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    cmd = sub.add_parser("alpha-star", help="print the dominance threshold")
    cmd.add_argument("--p", type=int)
    cmd.add_argument("--n", type=int)
    _add_common_arguments(cmd)

    cmd = sub.add_parser("risk", help="risk curve of one estimator")
    _add_problem_arguments(cmd, estimator=True)
    _add_engine_arguments(cmd)
    cmd.add_argument("--method", choices=driver.METHODS)
    cmd.add_argument("--samples", type=int)
    cmd.add_argument("--seed", type=int)
    cmd.add_argument("--stream", type=int)
    cmd.add_argument("--crn", dest="crn", action="store_true", default=None,
                     help="common random numbers across estimators")
    cmd.add_argument("--no-crn", dest="crn", action="store_false")
    cmd.add_argument("--out", help="output file (default stdout)")
    cmd.add_argument("--format", choices=driver.FORMATS)
    _add_common_arguments(cmd)

    cmd = sub.add_parser("dominance", help="scan Delta over a tau grid")
    _add_problem_arguments(cmd)
    _add_engine_arguments(cmd)
    cmd.add_argument("--tol", dest="violation_tol", type=float,
                     help="tolerated negative Delta")
    cmd.add_argument("--out", help="output file (default stdout)")
    cmd.add_argument("--format", choices=driver.FORMATS)
    _add_common_arguments(cmd)

    cmd = sub.add_parser("verify", help="run the verification suites")
    cmd.add_argument("suite", nargs="?", default="all", choices=driver.SUITES)
    _add_problem_arguments(cmd)
    cmd.add_argument("--nodes", type=int)
    cmd.add_argument("--fd-step", dest="fd_step", type=float)
    cmd.add_argument("--points", type=int)
    cmd.add_argument("--seed", dest="point_seed", type=int)
    cmd.add_argument("--out", help="JSON report file (default stdout)")
    _add_common_arguments(cmd)

    cmd = sub.add_parser("report", help="write the full acceptance report")
    _add_engine_arguments(cmd)
    cmd.add_argument("--out", default="shrinkvar-report",
                     help="output directory")
    _add_common_arguments(cmd)
    return parser


def _options(args):
    """The parsed flags that are configuration options."""
    return {k: v for k, v in vars(args).items() if k in driver.section_map}


def _emit(report, args, fmt, table):
    """Write `report` to --out or stdout, as CSV of `table` or as JSON."""
    with output_stream(args.out) as out:
        if fmt == "json":
            report.to_json(out)
        else:
            data = report.tables[table]
            write_csv(out, list(data.keys()), report.rows(table),
                      report.config)


def _finish(report):
    for line in driver.verdict_message(report):
        print(line, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_alpha_star(config, args):
    print("%#.12g" % driver.run_alpha_star(config))
    return EXIT_OK


def cmd_risk(config, args):
    report = driver.run_risk(config)
    _emit(report, args, driver.output_format(config), "risk")
    return _finish(report)


def cmd_dominance(config, args):
    report = driver.run_dominance(config)
    _emit(report, args, driver.output_format(config), "dominance")
    return _finish(report)


def cmd_verify(config, args):
    report = driver.run_verify(config, args.suite)
    _emit(report, args, "json", None)
    return _finish(report)


def cmd_report(config, args):
    report = driver.run_report(config, args.out)
    return _finish(report)


commands = {
    "alpha-star": cmd_alpha_star,
    "risk": cmd_risk,
    "dominance": cmd_dominance,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        config = driver.build_configuration(args.config, **_options(args))
        return commands[args.command](config, args)
    except (DomainError, ConfigError) as e:
        parser.print_usage(sys.stderr)
        print("shrinkvar: error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print("shrinkvar: I/O error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except ShrinkvarError as e:
        print("shrinkvar: %s" % e, file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
