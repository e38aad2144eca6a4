"""
Explicit group elements linking simple quadratic representatives, and
the obstruction that rules out partial versions of the II -> III move.
"""
from fractions import Fraction
from typing import List, NamedTuple
import nefflow.common.exceptions as exp
from nefflow.algebra.poly import MultiPoly, PolyMatrix
from nefflow.algebra.rational import RationalLike, as_fraction
from nefflow.catalog.families import CasalisFamily, casalis_representative
from nefflow.group.element import GroupElement
from nefflow.transform.action import RationalMatrixFunction, transform_variance


def witness_II_to_III(n: int) -> GroupElement:
    """g_c with c = (1, ..., 1); it maps -mm^T + diag(m) onto mm^T + diag(m)"""
    if n < 1:
        raise exp.ArgError(f"Dimension n must be at least 1, got {n}")
    return GroupElement.g_c([1] * n)


class IkChain(NamedTuple):
    g_bc: GroupElement
    g1: GroupElement
    g2: GroupElement
    expected: PolyMatrix


def witness_Ik_chain(n: int, k: int, c1: RationalLike = -1) -> IkChain:
    """
    The chain g_{b,c}, then J_{|c1|}, then the translation by e_1, which
    takes diag(m_1..m_k, 1..1) to mm^T + diag(0, m_2..m_k, c1 m_1 .. c1 m_1),
    with c = c1 e_1 and b = -e_1 / c1.
    """
    c1 = as_fraction(c1)
    if c1 >= 0:
        msg = f"""
        The witness chain needs c1 < 0, got {c1}. With c1 >= 0 the image
        of the domain of the means under h_{{b,c}} is empty.
        """
        raise exp.ArgError(msg)
    if not 1 <= k <= n:
        raise exp.ArgError(f"Need 1 <= k <= n, got k={k}, n={n}")

    c = [c1] + [0] * (n - 1)
    b = [-1 / c1] + [0] * (n - 1)
    g_bc = GroupElement.g_bc(b, c)
    g1 = GroupElement.jorgensen(n, -c1)
    e1 = [1] + [0] * (n - 1)
    g2 = GroupElement.affine([[int(i == j) for j in range(n)] for i in range(n)], e1)

    m = [MultiPoly.variable(n, i) for i in range(n)]
    diag = [MultiPoly.zero(n)] + m[1:k] + [m[0].scale(c1)] * (n - k)
    expected = PolyMatrix.outer(m, m) + PolyMatrix.diagonal(diag)
    return IkChain(g_bc, g1, g2, expected)


def run_Ik_chain(n: int, k: int, c1: RationalLike = -1) -> List[RationalMatrixFunction]:
    """The three intermediate variance functions of the chain, in order"""
    chain = witness_Ik_chain(n, k, c1)
    V = casalis_representative(CasalisFamily("I", n, k))
    stages = []
    current = V
    for g in (chain.g_bc, chain.g1, chain.g2):
        current = transform_variance(g, current)
        stages.append(current)
    return stages


def check_Ik_chain(n: int, k: int, c1: RationalLike = -1) -> bool:
    chain = witness_Ik_chain(n, k, c1)
    final = run_Ik_chain(n, k, c1)[-1]
    return final.equals(RationalMatrixFunction.from_polymatrix(chain.expected))


class PartialOnesObstruction(NamedTuple):
    """
    T_{g_c}(V_II) for c with ones in the first k places and zeros after.
    `square_k` and `square_k1` are the coefficients of m_k^2 in entry
    (k, k) and of m_{k+1}^2 in entry (k+1, k+1).
    """

    transformed: PolyMatrix
    square_k: Fraction
    square_k1: Fraction

    @property
    def opposite(self) -> bool:
        return self.square_k != 0 and self.square_k == -self.square_k1


def partial_ones_obstruction(n: int, k: int) -> PartialOnesObstruction:
    if not 1 <= k < n:
        raise exp.ArgError(f"Need 1 <= k < n for a partial all-ones vector, got k={k}, n={n}")
    V = casalis_representative(CasalisFamily("II", n))
    c = [1] * k + [0] * (n - k)
    transformed = transform_variance(GroupElement.g_c(c), V).as_variance().V

    def square(i: int) -> Fraction:
        return transformed[i, i].coefficient(tuple(2 * int(j == i) for j in range(n)))

    return PartialOnesObstruction(transformed, square(k - 1), square(k))
