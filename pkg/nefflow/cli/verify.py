"""
Seeded verification suites. Every suite draws from its own generator,
seeded with (seed, suite index), so running "all" gives the same checks
as running the suites one by one.
"""
import math
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple
import numpy as np
from prettytable import PrettyTable
from tqdm import tqdm
import nefflow.common.build as build
import nefflow.common.exceptions as exp
import nefflow.common.printing as printing
import nefflow.algebra.monomials as mono
from nefflow.algebra.rational import format_rational
from nefflow.algebra.series import SeriesVector, TruncSeries, series_exp
from nefflow.catalog.cubic import CubicOrbit, classify_cubic_orbit_n1
from nefflow.catalog.families import (
    CasalisFamily,
    all_casalis,
    casalis_representative,
    morris_representatives,
)
from nefflow.catalog.witnesses import (
    check_Ik_chain,
    partial_ones_obstruction,
    witness_II_to_III,
)
from nefflow.cli.report import RunReport
from nefflow.group.decompose import decompose_rank_one, random_decomposition_target
from nefflow.group.element import GroupElement
from nefflow.lagrange.inversion import (
    LagrangeProblem,
    compose_directly,
    lagrange_coefficient,
    lagrange_table,
    solve_functional_equation,
)
from nefflow.recover.pipeline import recover_measure, round_trip_agrees
from nefflow.rouques.checks import (
    continuous_convolution_check,
    convolution_identity_check,
    gaussian_closed_form_check,
    jorgensen_consistency_check,
    monte_carlo_moment_check,
    normalization_check,
    poisson_fixed_point_residual,
    poisson_truncation_bound,
    transformed_variance_named,
)
from nefflow.rouques.semigroups import HElement, Semigroup, SemigroupTag, TiltedDensity
from nefflow.transform.action import RationalMatrixFunction, transform_variance, transform_variance_cubic_n1
from nefflow.transform.conditions import (
    check_prop34_symmetry,
    cubic_obstruction,
    permutation_equivariance_check,
)

PASS = build.CheckStatus.PASS
FAIL = build.CheckStatus.FAIL
SKIP = build.CheckStatus.SKIP

SMALL_RATIONALS = tuple(Fraction(x) for x in ("-2", "-1", "-1/2", "0", "1/2", "1", "2"))

# Limits of the acceptance runs; --cases lowers them, never raises them
THEOREM52_C_PER_FAMILY = 50
STABILITY_CASES = 20
LAGRANGE_CASES = 50
DECOMPOSITION_EXACT_CASES = 200
DECOMPOSITION_FLOAT_CASES = 50
CUBIC_MOVES = 100

ROUQUES_THRESHOLDS = {
    "convolution": 1e-12,
    "continuous": 1e-6,
    "cumulant": 1e-8,
    "normalization": 1e-8,
    "jorgensen": 1e-8,
    "gaussian_closed_form": 1e-12,
    "monte_carlo_z": 5.0,
}


def small_rational(rng: np.random.Generator) -> Fraction:
    return SMALL_RATIONALS[int(rng.integers(len(SMALL_RATIONALS)))]


def small_vector(rng: np.random.Generator, n: int, nonzero: bool = False) -> List[Fraction]:
    vector = [small_rational(rng) for _ in range(n)]
    if nonzero and not any(vector):
        vector[int(rng.integers(n))] = Fraction(1)
    return vector


def random_group_element(rng: np.random.Generator, n: int) -> GroupElement:
    while True:
        rows = [[small_rational(rng) for _ in range(n + 1)] for _ in range(n + 1)]
        try:
            return GroupElement.from_rows(rows)
        except exp.SingularError:
            continue


def halve(x: Fraction) -> Fraction:
    return Fraction(int(x / 2))


def shrink_witness(values: Sequence[Fraction], fails: Callable[[List[Fraction]], bool]) -> List[Fraction]:
    """
    Halve coefficient magnitudes one at a time while the check keeps
    failing. A candidate that raises counts as passing.
    """
    current = list(values)
    improved = True
    while improved:
        improved = False
        for i, x in enumerate(current):
            if x == 0:
                continue
            candidate = current[:i] + [halve(x)] + current[i + 1 :]
            try:
                still_fails = fails(candidate)
            except exp.Error:
                still_fails = False
            if still_fails:
                current = candidate
                improved = True
    return current


def _text(values: Iterable[Fraction]) -> str:
    return "[" + ", ".join(format_rational(x) for x in values) + "]"


def _flatten(g: GroupElement) -> List[Fraction]:
    return [x for row in g.rows for x in row]


def _unflatten(values: Sequence[Fraction], n: int) -> GroupElement:
    size = n + 1
    return GroupElement.from_rows([values[i * size : (i + 1) * size] for i in range(size)])


def _run_check(report: RunReport, name: str, check: Callable[[], Tuple[Optional[bool], str]]):
    """A check returns (ok, detail); ok = None records a skip"""
    try:
        ok, detail = check()
    except exp.Error as e:
        report.add(name, FAIL, f"{type(e).__name__}: {str(e).strip()}")
        return
    if ok is None:
        report.add(name, SKIP, detail)
    else:
        report.add(name, PASS if ok else FAIL, detail)


def _progress(items, config: build.SuiteConfig, description: str):
    if config.monitor:
        return tqdm(items, desc=description, leave=False)
    return items


def _families(max_n: int) -> List[CasalisFamily]:
    return [family for n in range(1, max_n + 1) for family in all_casalis(n)]


##########################################
# composition
##########################################


def _composition_holds(g: GroupElement, g1: GroupElement, V) -> bool:
    left = transform_variance(g, transform_variance(g1, V))
    right = transform_variance(g1 @ g, V)
    return left.equals(right)


def suite_composition(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    for i in _progress(range(config.cases), config, "composition"):
        for n in (2, 3):
            g = random_group_element(rng, n)
            g1 = random_group_element(rng, n)
            for family in all_casalis(n):
                V = casalis_representative(family)

                def check(g=g, g1=g1, V=V, n=n):
                    if _composition_holds(g, g1, V):
                        return True, ""

                    def fails(values):
                        return not _composition_holds(_unflatten(values, n), g1, V)

                    small = shrink_witness(_flatten(g), fails)
                    return False, f"V={V.name} n={n} g={_text(small)} g1={g1.to_text()}"

                _run_check(report, f"composition/{i:03d}/{family.label}_n{n}", check)


##########################################
# prop34
##########################################


def suite_prop34(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    for family in _families(4):
        V = casalis_representative(family)

        def check(V=V):
            result = check_prop34_symmetry(V)
            return result.holds, "" if result.holds else str(result.witness)

        _run_check(report, f"prop34/catalog/{family.label}_n{family.n}", check)

    for V, name in morris_representatives():
        _run_check(report, f"prop34/morris/{name}", lambda V=V: (check_prop34_symmetry(V).holds, ""))

    families = _families(3)
    for i in _progress(range(min(config.cases, STABILITY_CASES)), config, "prop34"):
        family = families[int(rng.integers(len(families)))]
        V = casalis_representative(family)
        c = small_vector(rng, family.n)

        def check(V=V, c=c, family=family):
            moved = transform_variance(GroupElement.g_c(c), V)
            lowered = moved.try_lower()
            if lowered is None:
                return False, f"T_g(V) is not a polynomial for c={_text(c)}"
            result = check_prop34_symmetry(lowered)
            return result.holds, "" if result.holds else f"c={_text(c)} {result.witness}"

        _run_check(report, f"prop34/stability/{i:03d}/{family.label}_n{family.n}", check)


##########################################
# theorem52 (with the factorization and the cubic classes)
##########################################


def _gc_polynomial(V, c: Sequence[Fraction]) -> Tuple[bool, str]:
    moved = transform_variance(GroupElement.g_c(c), V)
    lowered = moved.try_lower()
    if lowered is None:
        return False, f"denominator {moved.denominator.to_text()} left for c={_text(c)}"
    if lowered.max_degree > 3:
        return False, f"degree {lowered.max_degree} for c={_text(c)}"
    cubic = lowered.map(lambda p: p.homogeneous_part(3))
    if cubic != cubic_obstruction(V, c):
        return False, f"cubic part differs from the predicted obstruction for c={_text(c)}"
    return True, ""


def suite_theorem52(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    per_family = min(config.cases, THEOREM52_C_PER_FAMILY)
    for family in _progress(_families(3), config, "theorem52"):
        V = casalis_representative(family)
        cs = [small_vector(rng, family.n) for _ in range(per_family)]

        def check(V=V, cs=cs):
            for c in cs:
                ok, detail = _gc_polynomial(V, c)
                if not ok:
                    small = shrink_witness(c, lambda values: not _gc_polynomial(V, values)[0])
                    return False, f"{detail}; shrunk c={_text(small)}"
            return True, f"{len(cs)} values of c"

        _run_check(report, f"theorem52/degree/{family.label}_n{family.n}", check)

    _decomposition_checks(config, rng, report)
    _cubic_class_checks(config, rng, report)


def _decomposition_checks(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    exact_cases = min(2 * config.cases, DECOMPOSITION_EXACT_CASES)
    for i in _progress(range(exact_cases), config, "factorization"):
        n = 1 + i % 3
        g = None
        while g is None:
            g = random_decomposition_target(rng, n)

        def check(g=g):
            factorization = decompose_rank_one(g)
            ok = factorization.exact and factorization.reconstruct() == g
            return ok, f"branch={factorization.branch.value}"

        _run_check(report, f"theorem52/factorization/{i:03d}", check)

    float_cases = min(max(config.cases // 2, 1), DECOMPOSITION_FLOAT_CASES)
    for i in range(float_cases):
        n = 2 + i % 2
        g = None
        while g is None:
            g = random_decomposition_target(rng, n, singular=True)

        def check(g=g):
            factorization = decompose_rank_one(g)
            residual = factorization.residual(g)
            return residual < 1e-9, f"branch={factorization.branch.value} residual={residual:.3g}"

        _run_check(report, f"theorem52/factorization_singular/{i:03d}", check)


MORRIS_ORBITS = {
    "Normal": CubicOrbit.X3,
    "Poisson": CubicOrbit.X2,
    "Gamma": CubicOrbit.X2,
    "Binomial": CubicOrbit.XXp1,
    "NegBinomial": CubicOrbit.XXp1,
    "Hyperbolic": CubicOrbit.X2p1,
}


def _cubic_class_checks(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    moves = min(config.cases, CUBIC_MOVES)
    for V, name in morris_representatives():
        poly = V.V[0, 0]
        gs = [random_group_element(rng, 1) for _ in range(moves)]

        def check(poly=poly, name=name, gs=gs):
            expected = MORRIS_ORBITS[name]
            orbit = classify_cubic_orbit_n1(poly)
            if orbit != expected:
                return False, f"classified as {orbit.value}, expected {expected.value}"
            for g in gs:
                moved = transform_variance_cubic_n1(g, poly).scale(1 / g.det**2)
                symbolic = transform_variance(g, V).try_lower()
                if symbolic is None or symbolic[0, 0] != moved:
                    return False, f"closed form and symbolic action differ for g={g.to_text()}"
                if classify_cubic_orbit_n1(moved) != expected:
                    return False, f"g={g.to_text()} moves {name} to {moved.to_text()}"
            return True, f"{expected.value} under {len(gs)} moves"

        _run_check(report, f"theorem52/cubic/{name}", check)


##########################################
# theorem54
##########################################


def suite_theorem54(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    for n in (1, 2, 3):
        def check(n=n):
            V2 = casalis_representative(CasalisFamily("II", n))
            V3 = casalis_representative(CasalisFamily("III", n))
            moved = transform_variance(witness_II_to_III(n), V2)
            return moved.equals(RationalMatrixFunction.from_polymatrix(V3.V)), ""

        _run_check(report, f"theorem54/II_to_III/n{n}", check)

    for n in (1, 2, 3):
        for k in range(1, n + 1):
            _run_check(report, f"theorem54/Ik_chain/n{n}_k{k}", lambda n=n, k=k: (check_Ik_chain(n, k), ""))

    for n in (2, 3):
        for k in range(1, n):
            def check(n=n, k=k):
                obstruction = partial_ones_obstruction(n, k)
                detail = f"m{k}^2 -> {obstruction.square_k}, m{k + 1}^2 -> {obstruction.square_k1}"
                return obstruction.opposite, detail

            _run_check(report, f"theorem54/partial_ones/n{n}_k{k}", check)

    families = [f for n in (2, 3) for f in all_casalis(n)]
    for i in range(min(config.cases, STABILITY_CASES)):
        family = families[int(rng.integers(len(families)))]
        n = family.n
        b = small_vector(rng, n)
        c = small_vector(rng, n)
        i1 = int(rng.integers(1, n))
        j1 = int(rng.integers(i1 + 1, n + 1))
        V = casalis_representative(family)

        def check(V=V, b=b, c=c, i1=i1, j1=j1):
            ok = permutation_equivariance_check(V, b, c, i1, j1)
            return ok, f"b={_text(b)} c={_text(c)} swap=({i1},{j1})"

        _run_check(report, f"theorem54/permutation/{i:03d}/{family.label}_n{n}", check)


##########################################
# lagrange
##########################################


def _random_series(rng: np.random.Generator, n: int, D: int, unit: bool) -> TruncSeries:
    terms = {k: small_rational(rng) for k in mono.up_to(n, min(D, 2))}
    if unit and not terms[mono.zero(n)]:
        terms[mono.zero(n)] = Fraction(1)
    return TruncSeries(n, D, terms)


def _lagrange_agrees(problem: LagrangeProblem) -> Tuple[bool, str]:
    direct = compose_directly(problem)
    for k, value in lagrange_table(problem).items():
        if direct.coefficient(k) != value:
            return False, f"k={k}: extraction {value}, composition {direct.coefficient(k)}"
    return True, ""


def suite_lagrange(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    for i in _progress(range(min(config.cases, LAGRANGE_CASES)), config, "lagrange"):
        n = 1 + i % 3
        D = int(rng.integers(2, 7)) if n < 3 else int(rng.integers(2, 5))
        g = SeriesVector(_random_series(rng, n, D, unit=True) for _ in range(n))
        g0 = _random_series(rng, n, D, unit=False)
        problem = LagrangeProblem(g, g0)
        _run_check(report, f"lagrange/random/{i:03d}_n{n}_D{D}", lambda p=problem: _lagrange_agrees(p))

    def tree_function():
        D = 6
        z = TruncSeries.variable(1, 0, D)
        problem = LagrangeProblem(SeriesVector([series_exp(z)]), z)
        h = solve_functional_equation(problem)[0]
        for k in range(1, D + 1):
            expected = Fraction(k ** (k - 1), math.factorial(k))
            if h.coefficient((k,)) != expected or lagrange_coefficient(problem, (k,)) != expected:
                return False, f"[w^{k}] h differs from {expected}"
        return True, ""

    _run_check(report, "lagrange/tree_function", tree_function)


##########################################
# recover
##########################################


def _multinomial(k: Sequence[int]) -> Fraction:
    value = Fraction(math.factorial(sum(k)))
    for ki in k:
        value /= math.factorial(ki)
    return value


def _inverse_factorials(k: Sequence[int]) -> Fraction:
    value = Fraction(1)
    for ki in k:
        value /= math.factorial(ki)
    return value


RECOVERY_CASES = (
    (CasalisFamily("III", 2), _multinomial),
    (CasalisFamily("III", 3), _multinomial),
    (CasalisFamily("I", 1, 1), _inverse_factorials),
    (CasalisFamily("I", 2, 2), _inverse_factorials),
    (CasalisFamily("III", 1), lambda k: Fraction(1)),
)


def suite_recover(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    D = config.max_degree
    for family, expected in _progress(RECOVERY_CASES, config, "recover"):
        V = casalis_representative(family)

        def masses(V=V, expected=expected):
            table = recover_measure(V, D)
            for k in mono.up_to(V.n, D):
                if table[k] != expected(k):
                    return False, f"mu_{k} = {table[k]}, expected {expected(k)}"
            return True, f"|k| <= {D}"

        def oracle(V=V):
            if D < 2:
                return None, "nothing to compare below degree 2"
            return round_trip_agrees(V, recover_measure(V, D)), f"through degree {D - 2}"

        _run_check(report, f"recover/masses/{family.label}_n{family.n}", masses)
        _run_check(report, f"recover/round_trip/{family.label}_n{family.n}", oracle)


##########################################
# rouques
##########################################


def _below(value: float, threshold: float) -> Tuple[bool, str]:
    return value < threshold, f"{value:.3g}"


POISSON = Semigroup(SemigroupTag.POISSON)


def rouques_convolution(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    limit = ROUQUES_THRESHOLDS
    for i in range(min(config.cases, 20)):
        lam = float(rng.uniform(0.2, 4.0))
        c = float(rng.uniform(0.0, 0.9))
        k = (int(rng.integers(0, 15)),)
        t = TiltedDensity(POISSON, HElement(lam, (c,)))
        _run_check(
            report,
            f"rouques/convolution/{i:03d}",
            lambda t=t, k=k: _below(convolution_identity_check(t, k), limit["convolution"]),
        )

    for i in range(5):
        lam = float(rng.uniform(0.5, 3.0))
        c = float(rng.uniform(0.2, 1.5))
        x = float(rng.uniform(0.2, 3.0))
        t = TiltedDensity(Semigroup(SemigroupTag.GAUSSIAN), HElement(lam, (c,)))
        _run_check(
            report,
            f"rouques/continuous/{i:03d}",
            lambda t=t, x=x: _below(continuous_convolution_check(t, x), limit["continuous"]),
        )


def rouques_normalization(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    limit = ROUQUES_THRESHOLDS["normalization"]
    for c in (0.0, 0.2, 0.5, 0.9):
        t = TiltedDensity(POISSON, HElement(1.0, (c,)))

        def normalized(t=t, c=c):
            kmax = max(config.kmax, poisson_truncation_bound(c))
            total = normalization_check(t, kmax)
            return 1 - limit <= total <= 1 + 1e-10, f"sum={total:.12f} kmax={kmax}"

        _run_check(report, f"rouques/normalization/poisson_c{c}", normalized)

    negbin = TiltedDensity(Semigroup(SemigroupTag.NEGBINOMIAL, 2, (0.2, 0.3)), HElement(1.0, (0.1, 0.1)))

    def negbin_normalized():
        total = normalization_check(negbin, min(config.kmax, 120))
        return 1 - limit <= total <= 1 + 1e-10, f"sum={total:.12f}"

    _run_check(report, "rouques/normalization/negbin_n2", negbin_normalized)


def rouques_cumulant(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    limit = ROUQUES_THRESHOLDS
    _run_check(
        report,
        "rouques/cumulant/poisson_fixed_point",
        lambda: _below(poisson_fixed_point_residual(0.3, -2.0, config.kmax), limit["cumulant"]),
    )
    t = TiltedDensity(POISSON, HElement(2.5, (0.3,)))
    _run_check(
        report,
        "rouques/cumulant/jorgensen",
        lambda: _below(jorgensen_consistency_check(t, [-1.0], config.kmax), limit["jorgensen"]),
    )


def rouques_moments(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    limit = ROUQUES_THRESHOLDS
    _run_check(
        report,
        "rouques/gaussian_closed_form",
        lambda: _below(gaussian_closed_form_check(rng, min(config.cases, 100)), limit["gaussian_closed_form"]),
    )

    def monte_carlo():
        result = monte_carlo_moment_check(1.0, 0.3, config.kmax, 20000, rng)
        return result.z_score < limit["monte_carlo_z"], f"z={result.z_score:.2f}"

    _run_check(report, "rouques/monte_carlo/poisson", monte_carlo)

    for tag in (SemigroupTag.GAMMA, SemigroupTag.POISSON):
        for lam, c in ((1, 1), (2, 1), (3, 2)):
            def named(tag=tag, lam=lam, c=c):
                closed = transformed_variance_named(tag, HElement(lam, (c,)))
                return True, closed.to_text()

            _run_check(report, f"rouques/closed_form/{tag.value}_{lam}_{c}", named)


ROUQUES_PARTS = {
    "convolution": rouques_convolution,
    "normalization": rouques_normalization,
    "cumulant": rouques_cumulant,
    "moments": rouques_moments,
}


def suite_rouques(config: build.SuiteConfig, rng: np.random.Generator, report: RunReport):
    for part in ROUQUES_PARTS.values():
        part(config, rng, report)


def run_rouques_check(part: str, config: build.SuiteConfig) -> RunReport:
    """One part of the rouques suite, seeded like the full suite"""
    if part not in ROUQUES_PARTS:
        raise exp.ArgError(f'Unknown rouques check "{part}". Choose from: {", ".join(ROUQUES_PARTS)}')
    report = RunReport(command=f"rouques-check {part}")
    rng = np.random.default_rng([config.seed, build.SUITES.index("rouques")])
    ROUQUES_PARTS[part](config, rng, report)
    return report.finish()


SUITE_RUNNERS: Dict[str, Callable[[build.SuiteConfig, np.random.Generator, RunReport], None]] = {
    "composition": suite_composition,
    "prop34": suite_prop34,
    "theorem52": suite_theorem52,
    "theorem54": suite_theorem54,
    "lagrange": suite_lagrange,
    "recover": suite_recover,
    "rouques": suite_rouques,
}


def selected_suites(suite: str) -> List[str]:
    return list(build.SUITES) if suite == "all" else [suite]


def run_verify(config: build.SuiteConfig, report: Optional[RunReport] = None) -> RunReport:
    if report is None:
        report = RunReport(command=f"verify {config.suite}")
    for name in selected_suites(config.suite):
        rng = np.random.default_rng([config.seed, build.SUITES.index(name)])
        if config.monitor:
            printing.log_info(f"Running suite {name}")
        SUITE_RUNNERS[name](config, rng, report)
    return report.finish()


def summary_table(report: RunReport) -> PrettyTable:
    table = PrettyTable()
    table.field_names = ["Suite", "Pass", "Fail", "Skip"]
    counts: Dict[str, Dict[str, int]] = {}
    for result in report.results:
        suite = result.name.split("/")[0]
        row = counts.setdefault(suite, {status.value: 0 for status in build.CheckStatus})
        row[result.status.value] += 1
    for suite in sorted(counts):
        row = counts[suite]
        table.add_row([suite, row["pass"], row["fail"], row["skip"]])
    return table


def print_summary(report: RunReport):
    printing.logn(str(summary_table(report)))
    for result in report.failed:
        printing.log_error(f"{result.name}: {result.detail}")
    if report.passed:
        printing.log_success(f"{len(report.results)} checks passed in {report.wall_seconds:.1f}s")


