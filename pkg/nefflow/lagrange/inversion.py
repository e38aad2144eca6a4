"""
Multivariate Lagrange inversion on truncated series.

For g = (g_1..g_n) with g_i(0) != 0 the equation h(w) = diag(w) g(h(w))
has a unique series solution vanishing at 0, and for any g0

    [w^k] g0(h(w)) = [z^k] g0(z) g(z)^k det(I - [z_i / g_i * dg_i/dz_j])

where g^k = prod_i g_i^{k_i}.
"""
import dataclasses
import functools
from fractions import Fraction
from typing import Dict, Optional
import nefflow.common.exceptions as exp
import nefflow.algebra.monomials as mono
from nefflow.algebra.monomials import ExponentVector
from nefflow.algebra.series import (
    SeriesVector,
    TruncSeries,
    series_compose,
    series_det,
    series_pow,
    series_reciprocal,
)


@dataclasses.dataclass(frozen=True)
class LagrangeProblem:
    """
    g and g0 are brought to the common truncation degree D (the smallest
    of the given ones when D is not set). g0 defaults to the constant 1.
    """

    g: SeriesVector
    g0: Optional[TruncSeries] = None
    D: Optional[int] = None

    def __post_init__(self):
        n = self.g.n
        if len(self.g) != n:
            raise exp.DimensionError(
                f"g has {len(self.g)} components but is a series in {n} variables"
            )
        for i, c in enumerate(self.g.constant_terms()):
            if c == 0:
                raise exp.ArgError(f"g_{i + 1} has zero constant term; Lagrange inversion needs g_i(0) != 0")
        g0 = self.g0 if self.g0 is not None else TruncSeries.one(n, self.g.D)
        if g0.n != n:
            raise exp.DimensionError(f"g0 is a series in {g0.n} variables, g in {n}")
        D = self.D if self.D is not None else min(self.g.D, g0.D)
        if D > min(self.g.D, g0.D):
            raise exp.ArgError(f"D={D} exceeds the degree to which g and g0 are known")
        object.__setattr__(self, "g", self.g.truncate(D))
        object.__setattr__(self, "g0", g0.truncate(D))
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.g.n

    @functools.cached_property
    def jacobian(self) -> TruncSeries:
        return jacobian_factor(self.g)


def solve_functional_equation(problem: LagrangeProblem) -> SeriesVector:
    """Fixed point h <- diag(w) g(h) starting from h = 0"""
    n, D = problem.n, problem.D
    h = SeriesVector(TruncSeries.zero(n, D) for _ in range(n))
    for _ in range(D + 1):
        new_h = SeriesVector(
            series_compose(problem.g[i], h).multiply_by_variable(i) for i in range(n)
        )
        if new_h == h:
            break
        h = new_h
    return h


def functional_residual(problem: LagrangeProblem, h: SeriesVector) -> SeriesVector:
    """h - diag(w) g(h), zero through D for a solution"""
    return SeriesVector(
        h[i] - series_compose(problem.g[i], h).multiply_by_variable(i) for i in range(problem.n)
    )


def jacobian_factor(g: SeriesVector) -> TruncSeries:
    """D(g) = det(I - [z_i / g_i * dg_i/dz_j])"""
    n, D = g.n, g.D
    rows = []
    for i in range(n):
        inverse = series_reciprocal(g[i])
        row = []
        for j in range(n):
            entry = (g[i].derivative(j).truncate(D).multiply_by_variable(i)) * inverse
            row.append(TruncSeries.one(n, D) - entry if i == j else -entry)
        rows.append(row)
    return series_det(rows)


def lagrange_coefficient(problem: LagrangeProblem, k: ExponentVector) -> Fraction:
    """[z^k] g0 g^k D(g), all products restricted to the box below k"""
    k = mono.validate(k, problem.n)
    if mono.degree(k) > problem.D:
        raise exp.ArgError(f"|k| = {mono.degree(k)} exceeds the truncation degree {problem.D}")
    product = problem.g0.restrict_box(k).mul_in_box(problem.jacobian, k)
    for i, e in enumerate(k):
        if e:
            product = product.mul_in_box(series_pow(problem.g[i], e, box=k), k)
    return product.coefficient(k)


def lagrange_table(problem: LagrangeProblem) -> Dict[ExponentVector, Fraction]:
    """lagrange_coefficient for every |k| <= D, in graded order"""
    return {k: lagrange_coefficient(problem, k) for k in mono.up_to(problem.n, problem.D)}


def compose_directly(problem: LagrangeProblem) -> TruncSeries:
    """g0(h(w)) by substitution, the other side of the inversion formula"""
    h = solve_functional_equation(problem)
    return series_compose(problem.g0, h)
