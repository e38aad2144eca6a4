"""
From a polynomial variance function to the masses of a measure on N^n
that generates it.

The chain is
    phi' = V(m)^{-1} m  ->  phi (phi(0) = 0)  ->  K with
    sum_k |k| a_k z^k = 1 - d(phi)/dz_i  ->  G = exp(K)  ->
    mu_k = [z^k] e^phi G^k D(G)
and the last step is a Lagrange inversion with g = G and g0 = e^phi.
"""
import dataclasses
from fractions import Fraction
from typing import Dict, List, Optional
import nefflow.common.exceptions as exp
import nefflow.algebra.monomials as mono
from nefflow.algebra.monomials import ExponentVector
from nefflow.algebra.poly import MultiPoly
from nefflow.algebra.rational import format_rational
from nefflow.algebra.series import (
    SeriesVector,
    TruncSeries,
    series_compose,
    series_exp,
    series_reciprocal,
    series_reversion,
    series_solve_vanishing_div,
)
from nefflow.lagrange.inversion import LagrangeProblem, lagrange_coefficient
from nefflow.transform.action import VarianceSpec


@dataclasses.dataclass(frozen=True)
class MeasureTable:
    """Masses mu_k for every |k| <= D, keyed by exponent vector"""

    n: int
    D: int
    masses: Dict[ExponentVector, Fraction]

    def __getitem__(self, k: ExponentVector) -> Fraction:
        return self.masses.get(tuple(k), Fraction(0))

    def generating_function(self) -> TruncSeries:
        """f(z) = sum_k mu_k z^k through degree D"""
        return TruncSeries(self.n, self.D, self.masses)

    def first_masses(self) -> Dict[str, str]:
        """mu_0 and mu_{e_i}, as text"""
        keys = [mono.zero(self.n)] + [mono.unit(self.n, i) for i in range(self.n)]
        return {str(k): format_rational(self[k]) for k in keys}


def phi_prime_from_variance(V: VarianceSpec, D: int) -> SeriesVector:
    """
    phi'_i = (adj(V) m)_i / det(V) as power series through degree D.
    NotAnalyticError when some component has no expansion at 0,
    NotNnTypeError when phi'(0) is not (1, ..., 1).
    """
    n = V.n
    det = V.V.determinant()
    if det.is_zero():
        raise exp.NotAnalyticError(f"det V(m) vanishes identically for {V.V.to_text()}")
    m = [MultiPoly.variable(n, i) for i in range(n)]
    numerators = V.V.adjugate().matvec(m)
    phi_prime = SeriesVector(series_solve_vanishing_div(det, p, D) for p in numerators)

    at_zero = phi_prime.constant_terms()
    if any(c != 1 for c in at_zero):
        msg = f"""
        V(m)^-1 m is {[format_rational(c) for c in at_zero]} at m = 0, not (1, ..., 1).
        The variance function {V.V.to_text()} does not come from a measure
        concentrated on N^{n} with mu_0 and every mu_(e_i) positive.
        """
        raise exp.NotNnTypeError(msg)
    return phi_prime


def integrate_phi(phi_prime: SeriesVector) -> TruncSeries:
    """
    The potential phi with phi(0) = 0 and gradient phi', known through
    D + 1. NotGradientError when the mixed partials disagree.
    """
    n, D = phi_prime.n, phi_prime.D
    if len(phi_prime) != n:
        raise exp.DimensionError(f"A gradient in {n} variables needs {n} components")
    terms: Dict[ExponentVector, Fraction] = {}
    for i, component in enumerate(phi_prime):
        for k, v in component.terms.items():
            target = k[:i] + (k[i] + 1,) + k[i + 1 :]
            value = v / (k[i] + 1)
            previous = terms.setdefault(target, value)
            if previous != value:
                raise exp.NotGradientError(_gradient_message(target, i))
    phi = TruncSeries(n, D + 1, terms)
    for i, component in enumerate(phi_prime):
        if not phi.derivative(i).agrees_with(component, D):
            raise exp.NotGradientError(_gradient_message(None, i))
    return phi


def _gradient_message(k: Optional[ExponentVector], i: int) -> str:
    where = f" at the monomial z^{k}" if k is not None else ""
    return f"""
    The series vector is not a gradient: component {i + 1} disagrees with
    the others{where} (mixed partial derivatives are not symmetric).
    """


def solve_K(phi: TruncSeries) -> SeriesVector:
    """
    K_i with sum_j z_j dK_i/dz_j = 1 - dphi/dz_i, i.e. a_k = [z^k](1 - dphi/dz_i) / |k|
    """
    n = phi.n
    components = []
    for i in range(n):
        rhs = 1 - phi.derivative(i)
        if rhs.constant_term != 0:
            msg = f"""
            1 - dphi/dz_{i + 1} has constant term {format_rational(rhs.constant_term)};
            it must vanish, which means dphi/dz_{i + 1}(0) = 1.
            """
            raise exp.NotNnTypeError(msg)
        components.append(
            TruncSeries._raw(n, rhs.D, {k: v / sum(k) for k, v in rhs.terms.items()})
        )
    return SeriesVector(components)


def exponentiate_K(K: SeriesVector) -> SeriesVector:
    return SeriesVector(series_exp(component) for component in K)


def extract_measure(phi: TruncSeries, G: SeriesVector) -> MeasureTable:
    """mu_k = [z^k] e^phi G^k D(G) for every |k| <= D"""
    D = G.D
    problem = LagrangeProblem(G, series_exp(phi.truncate(D)), D)
    masses = {}
    for k in mono.up_to(G.n, D):
        value = lagrange_coefficient(problem, k)
        if value:
            masses[k] = value
    return MeasureTable(G.n, D, masses)


def recover_measure(V: VarianceSpec, D: int) -> MeasureTable:
    phi = integrate_phi(phi_prime_from_variance(V, D))
    G = exponentiate_K(solve_K(phi))
    return extract_measure(phi, G)


def mean_map(f: TruncSeries) -> SeriesVector:
    """m_i(z) = z_i df/dz_i / f"""
    inverse = series_reciprocal(f)
    return SeriesVector(
        f.derivative(i).truncate(f.D).multiply_by_variable(i) * inverse for i in range(f.n)
    )


def variance_from_measure(table: MeasureTable) -> List[List[TruncSeries]]:
    """
    The variance function of the family generated by the table, as series
    in m: V_ij = z_j dm_i/dz_j evaluated at z = z(m), the inverse of the
    mean map
    """
    f = table.generating_function()
    if f.constant_term == 0:
        raise exp.ArgError("The measure has mu_0 = 0; its generating function is not a unit")
    means = mean_map(f)
    z_of_m = series_reversion(means)
    n, D = table.n, table.D
    return [
        [
            series_compose(means[i].derivative(j).truncate(D).multiply_by_variable(j), z_of_m)
            for j in range(n)
        ]
        for i in range(n)
    ]


def round_trip_agrees(V: VarianceSpec, table: MeasureTable) -> bool:
    """Compare V with the variance rebuilt from the table through degree D - 2"""
    rebuilt = variance_from_measure(table)
    through = table.D - 2
    for i in range(V.n):
        for j in range(V.n):
            expected = TruncSeries.from_poly(V.V[i, j], table.D)
            if not rebuilt[i][j].agrees_with(expected, through):
                return False
    return True
