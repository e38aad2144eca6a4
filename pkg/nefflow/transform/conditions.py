"""
Symbolic necessary conditions on variance functions: the symmetry of
f(D, D1) = V'(m)(V(m)D) D1 and the condition for T_{g_{b,c}} to keep a
simple quadratic variance quadratic.
"""
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union
import nefflow.common.exceptions as exp
from nefflow.algebra.monomials import ExponentVector
from nefflow.algebra.poly import MultiPoly, PolyMatrix
from nefflow.algebra.rational import RationalLike, as_fraction
from nefflow.group.decompose import permutation_conjugate
from nefflow.group.element import GroupElement
from nefflow.transform.action import (
    RationalMatrixFunction,
    VarianceSpec,
    lower_to_polymatrix,
    transform_variance,
)


class SymmetryWitness(NamedTuple):
    """
    Component i of f(D, D1) has different coefficients in front of
    D_l D1_j and D_j D1_l at the monomial m^k (indices 0-based)
    """

    i: int
    l: int
    j: int
    monomial: ExponentVector
    coefficient_lj: Fraction
    coefficient_jl: Fraction


class SymmetryCheck(NamedTuple):
    holds: bool
    witness: Optional[SymmetryWitness] = None

    def __bool__(self):
        return self.holds


def _polymatrix(V: Union[VarianceSpec, PolyMatrix, RationalMatrixFunction]) -> PolyMatrix:
    if isinstance(V, VarianceSpec):
        return V.V
    if isinstance(V, RationalMatrixFunction):
        return lower_to_polymatrix(V)
    if isinstance(V, PolyMatrix):
        return V
    raise exp.ArgError(f"Expected a polynomial variance function, got {type(V).__name__}")


def bilinear_coefficients(V: PolyMatrix) -> List[List[List[MultiPoly]]]:
    """
    B[i][l][j] = sum_k V_kl dV_ij/dm_k, so that
    f(D, D1)_i = sum_{l,j} B[i][l][j] D_l D1_j
    """
    n = V.size
    derivatives = [V.derivative(k) for k in range(n)]
    return [
        [
            [
                _sum(V[k, l] * derivatives[k][i, j] for k in range(n))
                for j in range(n)
            ]
            for l in range(n)
        ]
        for i in range(n)
    ]


def _sum(polys) -> MultiPoly:
    total = None
    for p in polys:
        total = p if total is None else total + p
    return total


def check_prop34_symmetry(V: Union[VarianceSpec, PolyMatrix, RationalMatrixFunction]) -> SymmetryCheck:
    """
    Check f(D, D1) = f(D1, D) as a polynomial identity in (m, D, D1),
    where f(D, D1) = V'(m)(V(m)D) D1 and V'(m)(X) = sum_k X_k dV/dm_k.
    """
    V = _polymatrix(V)
    B = bilinear_coefficients(V)
    n = V.size
    for i in range(n):
        for l in range(n):
            for j in range(l + 1, n):
                difference = B[i][l][j] - B[i][j][l]
                if not difference.is_zero():
                    k, _ = difference.sorted_terms()[0]
                    return SymmetryCheck(
                        False,
                        SymmetryWitness(
                            i, l, j, k, B[i][l][j].coefficient(k), B[i][j][l].coefficient(k)
                        ),
                    )
    return SymmetryCheck(True)


class SimpleQuadraticParts(NamedTuple):
    """V(m) = a mm^T + sum_k m_k B_k + C"""

    a: Fraction
    B: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]
    C: Tuple[Tuple[Fraction, ...], ...]


def decompose_simple_quadratic(V: Union[VarianceSpec, PolyMatrix]) -> SimpleQuadraticParts:
    """
    Split V by degree. The quadratic part must be a * mm^T with a read off
    the m_1^2 coefficient of the (1,1) entry.
    """
    V = _polymatrix(V)
    n = V.size
    if V.max_degree > 2:
        raise exp.ShapeError(f"Variance {V.to_text()} has degree {V.max_degree} > 2")

    square = tuple(2 if i == 0 else 0 for i in range(n))
    a = V[0, 0].coefficient(square)
    m = [MultiPoly.variable(n, i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            expected = (m[i] * m[j]).scale(a)
            if V[i, j].homogeneous_part(2) != expected:
                msg = f"""
                The quadratic part of {V.to_text()} is not a multiple of mm^T
                (entry ({i + 1}, {j + 1}) differs from {a} m{i + 1} m{j + 1}).
                """
                raise exp.ShapeError(msg)

    B = tuple(
        tuple(tuple(V[i, j].coefficient(_unit(n, k)) for j in range(n)) for i in range(n))
        for k in range(n)
    )
    C = tuple(tuple(V[i, j].constant_term for j in range(n)) for i in range(n))
    return SimpleQuadraticParts(a, B, C)


def _unit(n: int, k: int) -> ExponentVector:
    return tuple(int(i == k) for i in range(n))


def cubic_obstruction(V: Union[VarianceSpec, PolyMatrix], c: Sequence[RationalLike]) -> PolyMatrix:
    """
    a (c^T m) mm^T + m (c^T B(m) c) m^T + (c^T m) m (c^T C c) m^T, the
    cubic part that T_{g_{b,c}} adds to a simple quadratic variance
    """
    V = _polymatrix(V)
    n = V.size
    c = [as_fraction(x) for x in c]
    if len(c) != n:
        raise exp.DimensionError(f"c has length {len(c)} but V is {n}x{n}")
    parts = decompose_simple_quadratic(V)
    m = [MultiPoly.variable(n, i) for i in range(n)]
    c_dot_m = MultiPoly.linear_form(c)

    cBc = MultiPoly.zero(n)
    for k in range(n):
        quad = sum(
            (c[i] * parts.B[k][i][j] * c[j] for i in range(n) for j in range(n)), Fraction(0)
        )
        if quad:
            cBc = cBc + m[k].scale(quad)
    cCc = sum((c[i] * parts.C[i][j] * c[j] for i in range(n) for j in range(n)), Fraction(0))

    scalar = c_dot_m.scale(parts.a) + cBc + c_dot_m.scale(cCc)
    return PolyMatrix.outer(m, m) * scalar


def check_cubic_condition_NO3(V: Union[VarianceSpec, PolyMatrix], c: Sequence[RationalLike]) -> bool:
    """True iff T_{g_{b,c}}(V) stays quadratic, i.e. the cubic obstruction vanishes"""
    obstruction = cubic_obstruction(V, c)
    return all(p.is_zero() for row in obstruction.entries for p in row)


def permute_variance(V: RationalMatrixFunction, i: int, j: int) -> RationalMatrixFunction:
    """P V(Pm) P for P the transposition of coordinates i and j (0-based)"""
    n = V.n
    order = list(range(n))
    order[i], order[j] = order[j], order[i]
    swapped = [MultiPoly.variable(n, order[k]) for k in range(n)]
    entries = [
        [V.numerators[order[r], order[s]].substitute(swapped) for s in range(n)] for r in range(n)
    ]
    return RationalMatrixFunction(PolyMatrix(entries, n), V.denominator.substitute(swapped))


def permutation_equivariance_check(
    V: Union[VarianceSpec, PolyMatrix], b: Sequence[RationalLike], c: Sequence[RationalLike], i: int, j: int
) -> bool:
    """
    T_{g_{Pb,Pc}}(P V(P.) P) equals P T_{g_{b,c}}(V)(P.) P, with i < j
    1-indexed as in permutation_conjugate
    """
    rmf = RationalMatrixFunction.from_polymatrix(_polymatrix(V))
    g = GroupElement.g_bc(b, c)
    left = transform_variance(permutation_conjugate(g, i, j), permute_variance(rmf, i - 1, j - 1))
    right = permute_variance(transform_variance(g, rmf), i - 1, j - 1)
    return left.equals(right)
