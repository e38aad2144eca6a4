"""
The action of G on variance functions:

    T_g(V)(m) = 1/(c^T m + d) * h'_g(m)^{-1} V(h_g(m)) h'_g(m)^{-T}

computed symbolically. V(h_g(m)) is never formed as a fraction entry by
entry; each entry is homogenized with s(m) = c^T m + d instead, so the
result is a single polynomial matrix over a common denominator.
"""
import dataclasses
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union
import nefflow.common.exceptions as exp
import nefflow.algebra.linsolve as linsolve
from nefflow.algebra.poly import MultiPoly, PolyMatrix
from nefflow.algebra.rational import RationalLike, as_fraction
from nefflow.algebra.series import exact_quotient
from nefflow.group.element import (
    GroupElement,
    homography_eval,
    homography_jacobian,
    symbolic_jacobian_inverse,
)


@dataclasses.dataclass(frozen=True)
class VarianceSpec:
    """
    A polynomial variance function V(m) on R^n. `domain` describes the
    domain of the means M_F and is for display only.
    """

    n: int
    V: PolyMatrix
    domain: str = ""
    name: str = ""

    def __post_init__(self):
        if self.V.size != self.n or self.V.n != self.n:
            raise exp.DimensionError(
                f"A variance function on R^{self.n} needs an {self.n}x{self.n} matrix "
                f"of polynomials in {self.n} variables"
            )
        if not self.V.is_symmetric():
            raise exp.ArgError(f"Variance matrix {self.V.to_text()} is not symmetric")

    @classmethod
    def from_text(cls, entries: Sequence[Sequence[str]], domain: str = "", name: str = "") -> "VarianceSpec":
        from nefflow.algebra.parser import parse_polynomial

        n = len(entries)
        V = PolyMatrix([[parse_polynomial(text, n) for text in row] for row in entries], n)
        return cls(n, V, domain, name)

    @property
    def degree(self) -> int:
        return self.V.max_degree

    def evaluate(self, point: Sequence[RationalLike]) -> List[List[Fraction]]:
        return self.V.evaluate(point)


@dataclasses.dataclass(frozen=True)
class RationalMatrixFunction:
    """
    numerators(m) / denominator(m) with symmetric polynomial numerators.
    The constant factor of the denominator is normalized into the
    numerators, so a polynomial result has denominator exactly 1.
    """

    numerators: PolyMatrix
    denominator: MultiPoly

    def __post_init__(self):
        if self.denominator.is_zero():
            raise exp.ArgError("A rational matrix function cannot have a zero denominator")
        if not self.numerators.is_symmetric():
            raise exp.ArgError("Rational matrix function numerators must be symmetric")

    @classmethod
    def from_polymatrix(cls, V: PolyMatrix) -> "RationalMatrixFunction":
        return cls(V, MultiPoly.one(V.n))

    @property
    def n(self) -> int:
        return self.numerators.n

    @property
    def is_polynomial(self) -> bool:
        return self.denominator == MultiPoly.one(self.n)

    @property
    def degree(self) -> int:
        """Total degree of the numerators (meaningful once the denominator is 1)"""
        return self.numerators.max_degree

    def evaluate(self, point: Sequence[RationalLike]) -> List[List[Fraction]]:
        den = self.denominator.evaluate(point)
        if den == 0:
            raise exp.SingularError("The denominator vanishes at the evaluation point")
        return [[x / den for x in row] for row in self.numerators.evaluate(point)]

    def equals(self, other: "RationalMatrixFunction") -> bool:
        """Equality of rational functions, by cross-multiplication"""
        if other.n != self.n:
            return False
        left = self.numerators * other.denominator
        right = other.numerators * self.denominator
        return left == right

    def normalized(self) -> "RationalMatrixFunction":
        """Move a constant denominator into the numerators"""
        if self.denominator.is_constant():
            c = self.denominator.constant_term
            return RationalMatrixFunction(
                self.numerators.map(lambda p: p.scale(1 / c)), MultiPoly.one(self.n)
            )
        return self

    def try_lower(self) -> Optional[PolyMatrix]:
        """
        The polynomial matrix equal to this function, or None when the
        denominator does not divide every numerator
        """
        try:
            return lower_to_polymatrix(self)
        except exp.NotAnalyticError:
            return None

    def as_variance(self, domain: str = "", name: str = "") -> VarianceSpec:
        return VarianceSpec(self.n, lower_to_polymatrix(self), domain, name)


VarianceLike = Union[VarianceSpec, RationalMatrixFunction, PolyMatrix]


def _as_rational(V: VarianceLike) -> RationalMatrixFunction:
    if isinstance(V, RationalMatrixFunction):
        return V
    if isinstance(V, VarianceSpec):
        return RationalMatrixFunction.from_polymatrix(V.V)
    if isinstance(V, PolyMatrix):
        return RationalMatrixFunction.from_polymatrix(V)
    raise exp.ArgError(f"Expected a variance function, got {type(V).__name__}")


def lower_to_polymatrix(rmf: RationalMatrixFunction) -> PolyMatrix:
    """
    Divide every numerator by the denominator exactly (vanishing-division
    kernel with a consistency check). NotAnalyticError if any entry is not
    a polynomial.
    """
    den = rmf.denominator
    return rmf.numerators.map(lambda p: exact_quotient(p, den))


def homogenized_substitution(
    p: MultiPoly, top: Sequence[MultiPoly], s: MultiPoly, E: int, cache: Dict
) -> MultiPoly:
    """
    s^E p(top / s) = sum_k p_k top^k s^(E - |k|), for E >= deg p
    """
    n = s.n
    result = MultiPoly.zero(n)
    for k, coefficient in p.terms.items():
        term = MultiPoly.constant(n, coefficient)
        for i, e in enumerate(k):
            if e:
                key = ("top", i, e)
                if key not in cache:
                    cache[key] = top[i] ** e
                term = term * cache[key]
        rest = E - sum(k)
        if rest:
            key = ("s", rest)
            if key not in cache:
                cache[key] = s**rest
            term = term * cache[key]
        result = result + term
    return result


def transform_variance(g: GroupElement, V: VarianceLike) -> RationalMatrixFunction:
    """
    Symbolic T_g(V) for a polynomial or rational variance function V.

    With V = N/q, R = A' - m c'^T from g^{-1} and the symbolic inverse
    Jacobian equal to s R, one gets
        T_g(V) = s^(1 + deg q - deg N) R N~ R^T / q~
    where N~ = s^deg N N(h_g) and q~ = s^deg q q(h_g). Powers of s are
    cancelled while s divides every numerator.
    """
    rmf = _as_rational(V)
    n = g.n
    if rmf.n != n or rmf.numerators.size != n:
        raise exp.DimensionError(
            f"Variance function on R^{rmf.n} cannot be transformed by an element of GL({n + 1})"
        )

    s = g.denominator()
    top = g.numerator_map()
    jinv = symbolic_jacobian_inverse(g)
    # The numerators of the inverse Jacobian are s * (adj(g) blocks); strip s
    R = jinv.numerators.map(lambda p: exact_quotient(p, s))
    det_sq = jinv.denominator.constant_term ** 2

    cache: Dict = {}
    E_num = max(rmf.numerators.max_degree, 0)
    E_den = rmf.denominator.degree
    N_tilde = rmf.numerators.map(lambda p: homogenized_substitution(p, top, s, E_num, cache))
    q_tilde = homogenized_substitution(rmf.denominator, top, s, E_den, {})

    numerators = R * N_tilde * R.transpose()
    exponent = 1 + E_den - E_num
    if exponent > 0:
        numerators = numerators * (s**exponent)
        exponent = 0

    # Cancel s from the denominator s^(-exponent) while possible
    while exponent < 0 and not s.is_constant():
        try:
            numerators = numerators.map(lambda p: exact_quotient(p, s))
        except exp.NotAnalyticError:
            break
        exponent += 1
    if exponent < 0 and s.is_constant():
        numerators = numerators.map(lambda p: p.scale(s.constant_term**exponent))
        exponent = 0

    denominator = q_tilde.scale(det_sq) * (s ** (-exponent))
    return RationalMatrixFunction(numerators, denominator).normalized()


def transform_variance_cubic_n1(g: GroupElement, V: MultiPoly) -> MultiPoly:
    """(cm + d)^3 V((am + b)/(cm + d)) for n = 1 and deg V <= 3"""
    if g.n != 1 or V.n != 1:
        raise exp.DimensionError("transform_variance_cubic_n1 works on the real line only")
    if V.degree > 3:
        raise exp.ArgError(f"{V.to_text()} has degree {V.degree} > 3")
    s = g.denominator()
    top = g.numerator_map()
    return homogenized_substitution(V, top, s, 3, {})


def transform_closed_form_gc(
    c: Sequence[RationalLike],
    part: str,
    payload: Optional[Union[Sequence[Sequence[Sequence[RationalLike]]], Sequence[Sequence[RationalLike]]]] = None,
) -> PolyMatrix:
    """
    T_{g_c} on the three pieces of a simple quadratic variance:
      rank_one: V = mm^T             -> (c^T m + 1) mm^T
      linear:   V = sum_i m_i B_i    -> [I + mc^T] B(m) [I + cm^T]
      constant: V = C                -> (c^T m + 1) [I + mc^T] C [I + cm^T]
    """
    c = [as_fraction(x) for x in c]
    n = len(c)
    m = [MultiPoly.variable(n, i) for i in range(n)]
    s = MultiPoly.linear_form(c, 1)
    left = PolyMatrix.identity(n) + PolyMatrix.outer(m, [MultiPoly.constant(n, x) for x in c])
    right = left.transpose()

    if part == "rank_one":
        if payload is not None:
            raise exp.ArgError("The rank_one closed form takes no payload")
        return PolyMatrix.outer(m, m) * s

    if part == "linear":
        if payload is None or len(payload) != n:
            raise exp.ArgError(f"The linear closed form needs {n} matrices B_1..B_{n}")
        B = PolyMatrix.zero(n)
        for i, Bi in enumerate(payload):
            _check_square(Bi, n)
            B = B + PolyMatrix.from_scalars([[as_fraction(x) for x in row] for row in Bi], n) * m[i]
        return left * B * right

    if part == "constant":
        if payload is None:
            raise exp.ArgError("The constant closed form needs the matrix C")
        _check_square(payload, n)
        C = PolyMatrix.from_scalars([[as_fraction(x) for x in row] for row in payload], n)
        return (left * C * right) * s

    raise exp.ArgError(f'Unknown part "{part}"; expected rank_one, linear or constant')


def _check_square(matrix, n: int):
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise exp.ArgError(f"Expected an {n}x{n} matrix, got {matrix}")


def evaluate_pointwise(g: GroupElement, V: VarianceLike, m: Sequence[RationalLike]) -> List[List[Fraction]]:
    """
    T_g(V)(m) at one point, straight from the definition with the numeric
    homography and Jacobian
    """
    rmf = _as_rational(V)
    m = [as_fraction(x) for x in m]
    s = g.denominator().evaluate(m)
    h = homography_eval(g, m)
    J_inv = linsolve.inverse(homography_jacobian(g, m))
    inner = rmf.evaluate(h)
    product = linsolve.matmul(linsolve.matmul(J_inv, inner), linsolve.transpose(J_inv))
    return [[x / s for x in row] for row in product]


def transform_affine_closed_form(
    A: Sequence[Sequence[RationalLike]], b: Sequence[RationalLike], V: VarianceSpec
) -> PolyMatrix:
    """A^{-1} V(Am + b) A^{-T}, the action of [[A, b], [0, 1]]"""
    n = V.n
    A = [[as_fraction(x) for x in row] for row in A]
    A_inv = PolyMatrix.from_scalars(linsolve.inverse(A), n)
    image = [MultiPoly.linear_form(row, as_fraction(bi)) for row, bi in zip(A, b)]
    moved = V.V.map(lambda p: p.substitute(image))
    return A_inv * moved * A_inv.transpose()


def transform_jorgensen_closed_form(lam: RationalLike, V: VarianceSpec) -> PolyMatrix:
    """lambda V(m / lambda), the action of J_lambda"""
    lam = as_fraction(lam)
    n = V.n
    scaled = [MultiPoly.variable(n, i).scale(1 / lam) for i in range(n)]
    return V.V.map(lambda p: p.substitute(scaled).scale(lam))

