"""
The nefflow command line tool.

Results (JSON files, TSV tables, orbit tags) go to --out or stdout;
progress, warnings and errors go to stderr.
"""
import argparse
import sys
import traceback
from typing import List, Optional
import nefflow.common.build as build
import nefflow.common.exceptions as exp
import nefflow.common.printing as printing
import nefflow.algebra.monomials as mono
from nefflow.algebra.parser import parse_polynomial, parse_series, parse_series_list
from nefflow.algebra.series import SeriesVector
from nefflow.catalog.cubic import classify_cubic_orbit_n1, morris_fingerprint
from nefflow.catalog.families import (
    CASALIS_TAGS,
    CasalisFamily,
    casalis_representative,
    morris_representatives,
)
from nefflow.cli import fileio, ignition, verify
from nefflow.cli.report import RunReport, input_digest
from nefflow.lagrange.inversion import LagrangeProblem, lagrange_table
from nefflow.recover.stages import RecoveryState, default_recovery_sequence
from nefflow.rouques.densities import continuous_density, mass_table, table_rows
from nefflow.rouques.semigroups import HElement, Semigroup, SemigroupTag, TiltedDensity
from nefflow.transform.action import transform_variance
from nefflow.version import __version__ as nefflow_version

USAGE_ERRORS = (exp.ArgError, exp.ParseError, exp.DimensionError, exp.SingularError)
PRECONDITION_ERRORS = (exp.NotNnTypeError, exp.NotAnalyticError, exp.NotGradientError)


def _write_report(report: RunReport, path: Optional[str]):
    if path:
        report.save(path)


##########################################
# transform / compose
##########################################


def cmd_transform(args) -> int:
    V = fileio.load_variance_function(args.variance)
    g = fileio.load_group(args.group)
    result = transform_variance(g, V)
    fileio.save_variance(result, args.out)

    if not args.check_degree:
        return build.EXIT_OK

    report = RunReport("transform", input_digest([args.variance, args.group]))
    lowered = result.try_lower()
    if lowered is None:
        report.add("degree_bound", build.CheckStatus.FAIL, "T_g(V) is not a polynomial")
    elif lowered.max_degree > 3:
        report.add("degree_bound", build.CheckStatus.FAIL, f"degree {lowered.max_degree} > 3")
    else:
        report.add("degree_bound", build.CheckStatus.PASS, f"degree {lowered.max_degree}")
    report.finish()
    _write_report(report, args.report)
    for result_line in report.results:
        printing.log_info(f"{result_line.name}: {result_line.status.value} ({result_line.detail})")
    return build.EXIT_OK if report.passed else build.EXIT_CHECK_FAILED


def cmd_compose(args) -> int:
    if len(args.group) < 2:
        raise exp.ArgError("compose needs at least two --group files")
    elements = [fileio.load_group(path) for path in args.group]
    product = elements[0]
    for g in elements[1:]:
        product = product @ g
    fileio.save_group(product, args.out)
    return build.EXIT_OK


##########################################
# catalog / classify-cubic
##########################################


def cmd_classify_cubic(args) -> int:
    V = parse_polynomial(args.polynomial, 1)
    if args.fingerprint:
        fingerprint = morris_fingerprint(V)
        sys.stdout.write(
            f"degree={fingerprint.degree}\torbit={fingerprint.orbit.value}\t"
            f"quadratic_sign={fingerprint.quadratic_sign}\n"
        )
    else:
        sys.stdout.write(classify_cubic_orbit_n1(V).value + "\n")
    return build.EXIT_OK


def cmd_catalog(args) -> int:
    morris = {name.lower(): V for V, name in morris_representatives()}
    if args.family.lower() in morris:
        if args.n != 1 or args.k is not None:
            raise exp.ArgError(f"The Morris family {args.family} lives on the real line; drop --n and --k")
        V = morris[args.family.lower()]
    else:
        V = casalis_representative(CasalisFamily(args.family, args.n, args.k))
    fileio.save_variance(V, args.out)
    return build.EXIT_OK


##########################################
# recover / lagrange
##########################################


def cmd_recover(args) -> int:
    config = ignition.lock_recovery_config(args.max_degree, args.check_oracle)
    V = fileio.load_variance(args.variance)
    state = RecoveryState(V, config)
    try:
        default_recovery_sequence().launch(state, monitor=args.monitor)
    except exp.StageError:
        if state.info.oracle_passed is False:
            if args.state_file:
                state.save(args.state_file)
            printing.log_error("The recovered masses do not reproduce the variance function")
            return build.EXIT_CHECK_FAILED
        raise

    n = V.n
    rows = []
    for k in mono.up_to(n, config.max_degree):
        mass = state.measure[k]
        rows.append(list(k) + [mass.numerator, mass.denominator])
    fileio.save_tsv(fileio.exponent_header(n, "mu_numerator", "mu_denominator"), rows, args.out)

    if args.monitor:
        masses = ", ".join(f"{k}: {v}" for k, v in state.info.first_masses.items())
        printing.log_info(f"First masses {masses}")
    if args.state_file:
        state.save(args.state_file)
    return build.EXIT_OK


def cmd_lagrange(args) -> int:
    D = build.DEFAULT_MAX_DEGREE if args.max_degree is None else args.max_degree
    if D < 0:
        raise exp.ArgError(f"--max-degree must be non-negative, got {D}")
    n = len(args.g.split(";"))
    g = SeriesVector(parse_series_list(args.g, n, D))
    g0 = parse_series(args.g0, n, D)
    table = lagrange_table(LagrangeProblem(g, g0, D))
    rows = [list(k) + [value.numerator, value.denominator] for k, value in table.items()]
    fileio.save_tsv(fileio.exponent_header(n, "numerator", "denominator"), rows, args.out)
    return build.EXIT_OK


##########################################
# rouques
##########################################


def cmd_rouques(args) -> int:
    tag = SemigroupTag.from_text(args.semigroup)
    c = fileio.parse_float_vector(args.c)
    p = tuple(fileio.parse_float_vector(args.p)) if args.p else ()
    semigroup = Semigroup(tag, len(c), p)
    t = TiltedDensity(semigroup, HElement(args.lam, tuple(c)))

    if semigroup.is_discrete:
        kmax = build.DEFAULT_KMAX if args.kmax is None else args.kmax
        rows = [list(k) + [repr(mass)] for k, mass in table_rows(mass_table(t, kmax))]
        header = ["k", "mass"] if semigroup.n == 1 else fileio.exponent_header(semigroup.n, "mass")
        fileio.save_tsv(header, rows, args.out)
        return build.EXIT_OK

    if not args.x:
        raise exp.ArgError(f"{tag.value} has a density on R; pass the evaluation points with --x")
    xs = fileio.parse_float_vector(args.x)
    fileio.save_tsv(["x", "density"], [[x, repr(continuous_density(t, x))] for x in xs], args.out)
    return build.EXIT_OK


def cmd_rouques_check(args) -> int:
    config = ignition.lock_suite_config(
        "rouques", seed=args.seed, cases=args.cases, kmax=args.kmax, monitor=False
    )
    report = verify.run_rouques_check(args.suite, config)
    report.inputs = input_digest(extra={"suite": args.suite, "seed": config.seed, "kmax": config.kmax})
    text = report.to_json()
    if args.report:
        report.save(args.report)
    else:
        sys.stdout.write(text)
    return build.EXIT_OK if report.passed else build.EXIT_CHECK_FAILED


##########################################
# verify
##########################################


def cmd_verify(args) -> int:
    config = ignition.lock_suite_config(
        args.suite,
        seed=args.seed,
        cases=args.cases,
        max_degree=args.max_degree,
        kmax=args.kmax,
        monitor=args.monitor,
    )
    report = RunReport(f"verify {config.suite}")
    report.inputs = input_digest(
        extra={
            "suite": config.suite,
            "seed": config.seed,
            "cases": config.cases,
            "max_degree": config.max_degree,
            "kmax": config.kmax,
        }
    )
    verify.run_verify(config, report)
    verify.print_summary(report)
    if args.report:
        report.save(args.report)
    return build.EXIT_OK if report.passed else build.EXIT_CHECK_FAILED


##########################################
# argument parsing
##########################################


def _add_suite_args(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=None, help=f"Random seed (default {build.DEFAULT_SEED})")
    parser.add_argument(
        "--cases", type=int, default=None, help=f"Random cases per check (default {build.DEFAULT_CASES})"
    )
    parser.add_argument(
        "--kmax", type=int, default=None, help=f"Truncation of infinite sums (default {build.DEFAULT_KMAX})"
    )
    parser.add_argument("--report", default=None, help="Write the JSON run report to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nefflow",
        description="Group actions on variance functions and recovery of generating measures",
    )
    parser.add_argument("--version", action="version", version=f"nefflow {nefflow_version}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    transform = subparsers.add_parser("transform", help="Apply T_g to a variance function")
    transform.add_argument("--variance", required=True, help="Variance JSON file")
    transform.add_argument("--group", required=True, help="Group element JSON file")
    transform.add_argument("--out", default=None, help="Output variance file (default: stdout)")
    transform.add_argument(
        "--check-degree",
        action="store_true",
        default=False,
        help="Fail unless T_g(V) is a polynomial of total degree <= 3",
    )
    transform.add_argument("--report", default=None, help="Write the JSON report of --check-degree here")
    transform.set_defaults(func=cmd_transform)

    compose = subparsers.add_parser("compose", help="Multiply group elements, left to right")
    compose.add_argument("--group", action="append", required=True, help="Group element JSON file")
    compose.add_argument("--out", default=None, help="Output group file (default: stdout)")
    compose.set_defaults(func=cmd_compose)

    classify = subparsers.add_parser("classify-cubic", help="Orbit class of a variance of degree <= 3 on R")
    classify.add_argument("polynomial", help='Polynomial in m1, for example "m1 - m1^2"')
    classify.add_argument(
        "--fingerprint",
        action="store_true",
        default=False,
        help="Also print the degree and the sign of the m1^2 coefficient",
    )
    classify.set_defaults(func=cmd_classify_cubic)

    catalog = subparsers.add_parser("catalog", help="Emit a catalog variance function")
    catalog.add_argument(
        "--family",
        required=True,
        help=f"One of {', '.join(CASALIS_TAGS)} or a Morris family name (Normal, Poisson, ...)",
    )
    catalog.add_argument("--n", type=int, default=1, help="Dimension")
    catalog.add_argument("--k", type=int, default=None, help="k for the I and IV families")
    catalog.add_argument("--out", default=None, help="Output variance file (default: stdout)")
    catalog.set_defaults(func=cmd_catalog)

    recover = subparsers.add_parser("recover", help="Recover the masses of the generating measure")
    recover.add_argument("--variance", required=True, help="Variance JSON file")
    recover.add_argument(
        "--max-degree", type=int, default=None, help=f"Truncation degree D (default {build.DEFAULT_MAX_DEGREE})"
    )
    recover.add_argument("--out", default=None, help="Output TSV file (default: stdout)")
    recover.add_argument(
        "--check-oracle",
        action="store_true",
        default=False,
        help="Rebuild V from the masses and compare through degree D - 2",
    )
    recover.add_argument("--state-file", default=None, help="Write a YAML summary of the run here")
    recover.add_argument(
        "--monitor", action="store_true", default=False, help="Print one line per pipeline stage"
    )
    recover.set_defaults(func=cmd_recover)

    lagrange = subparsers.add_parser("lagrange", help="Lagrange inversion coefficient table")
    lagrange.add_argument("--g", required=True, help='Components of g separated by ";", e.g. "exp(z1)"')
    lagrange.add_argument("--g0", default="1", help="The series g0 (default 1)")
    lagrange.add_argument("--max-degree", type=int, default=None, help="Truncation degree D")
    lagrange.add_argument("--out", default=None, help="Output TSV file (default: stdout)")
    lagrange.set_defaults(func=cmd_lagrange)

    rouques = subparsers.add_parser("rouques", help="Masses or densities of a tilted family")
    rouques.add_argument(
        "--semigroup", required=True, help=", ".join(tag.value for tag in SemigroupTag)
    )
    rouques.add_argument("--lambda", dest="lam", type=float, required=True, help="lambda > 0")
    rouques.add_argument("--c", required=True, help="Comma-separated c")
    rouques.add_argument("--p", default=None, help="Comma-separated p for NegBinomialRn")
    rouques.add_argument("--kmax", type=int, default=None, help="Largest |k| in the table")
    rouques.add_argument("--x", default=None, help="Comma-separated evaluation points (continuous)")
    rouques.add_argument("--out", default=None, help="Output TSV file (default: stdout)")
    rouques.set_defaults(func=cmd_rouques)

    rouques_check = subparsers.add_parser("rouques-check", help="Numeric identities of the tilted families")
    rouques_check.add_argument("--suite", required=True, choices=sorted(verify.ROUQUES_PARTS))
    _add_suite_args(rouques_check)
    rouques_check.set_defaults(func=cmd_rouques_check)

    verify_parser = subparsers.add_parser("verify", help="Run the seeded verification suites")
    verify_parser.add_argument("--suite", default="all", help=f"One of {', '.join(build.SUITES)} or all")
    verify_parser.add_argument("--max-degree", type=int, default=None, help="Truncation degree of recoveries")
    verify_parser.add_argument(
        "--monitor", dest="monitor", action="store_true", default=True, help="Show progress (default)"
    )
    verify_parser.add_argument("--no-monitor", dest="monitor", action="store_false", help="Hide progress")
    _add_suite_args(verify_parser)
    verify_parser.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return build.EXIT_USAGE if e.code else build.EXIT_OK

    try:
        return args.func(args)
    except USAGE_ERRORS as e:
        code, error = build.EXIT_USAGE, e
    except PRECONDITION_ERRORS as e:
        code, error = build.EXIT_PRECONDITION, e
    except exp.Error as e:
        code, error = build.EXIT_INTERNAL, e
    except Exception as e:  # pylint: disable=broad-except
        code, error = build.EXIT_INTERNAL, e

    if build.DEBUG:
        traceback.print_exception(type(error), error, error.__traceback__)
    printing.log_error(str(error).strip())
    return code


if __name__ == "__main__":
    sys.exit(main())
