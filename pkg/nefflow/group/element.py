"""
Elements g = [[A, b], [c^T, d]] of GL(n+1) and the homographies
h_g(m) = (Am + b) / (c^T m + d) they define on R^n.
"""
import dataclasses
from fractions import Fraction
from typing import List, NamedTuple, Sequence, Tuple
import nefflow.common.exceptions as exp
import nefflow.algebra.linsolve as linsolve
from nefflow.algebra.poly import MultiPoly, PolyMatrix
from nefflow.algebra.rational import RationalLike, as_fraction, format_rational

Point = Sequence[RationalLike]


@dataclasses.dataclass(frozen=True)
class GroupElement:
    """
    An invertible (n+1)x(n+1) rational matrix, stored row-major. The blocks
    are A (top-left n x n), b (last column without the corner), c (first n
    entries of the last row) and the corner d.
    """

    n: int
    rows: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(x) for x in row) for row in self.rows)
        size = self.n + 1
        if self.n < 1 or len(rows) != size or any(len(row) != size for row in rows):
            raise exp.DimensionError(
                f"A group element for n={self.n} must be a {size}x{size} matrix"
            )
        object.__setattr__(self, "rows", rows)
        if linsolve.determinant(rows) == 0:
            raise exp.SingularError(f"Matrix {self.to_text()} is not invertible")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "GroupElement":
        return cls(len(rows) - 1, tuple(tuple(row) for row in rows))

    @classmethod
    def from_blocks(
        cls,
        A: Sequence[Sequence[RationalLike]],
        b: Sequence[RationalLike],
        c: Sequence[RationalLike],
        d: RationalLike,
    ) -> "GroupElement":
        n = len(A)
        rows = [list(A[i]) + [b[i]] for i in range(n)]
        rows.append(list(c) + [d])
        return cls(n, tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(n, tuple(linsolve.identity(n + 1)))

    @classmethod
    def affine(cls, A: Sequence[Sequence[RationalLike]], b: Sequence[RationalLike]) -> "GroupElement":
        return cls.from_blocks(A, b, [0] * len(A), 1)

    @classmethod
    def jorgensen(cls, n: int, lam: RationalLike) -> "GroupElement":
        """J_lambda = [[I, 0], [0, lambda]]"""
        return cls.from_blocks(linsolve.identity(n), [0] * n, [0] * n, lam)

    @classmethod
    def g_c(cls, c: Sequence[RationalLike]) -> "GroupElement":
        """[[I, 0], [c^T, 1]]"""
        n = len(c)
        return cls.from_blocks(linsolve.identity(n), [0] * n, c, 1)

    @classmethod
    def g_bc(cls, b: Sequence[RationalLike], c: Sequence[RationalLike]) -> "GroupElement":
        """g_{b,c} = [[I + bc^T, b], [c^T, 1]] (always has determinant 1)"""
        n = len(c)
        b = [as_fraction(x) for x in b]
        c = [as_fraction(x) for x in c]
        A = [[int(i == j) + b[i] * c[j] for j in range(n)] for i in range(n)]
        return cls.from_blocks(A, b, c, 1)

    @classmethod
    def h_element(cls, c: Sequence[RationalLike], lam: RationalLike) -> "GroupElement":
        """g_c J_lambda = [[I, 0], [c^T, lambda]], the elements of the subgroup H"""
        n = len(c)
        return cls.from_blocks(linsolve.identity(n), [0] * n, c, lam)

    @property
    def A(self) -> List[List[Fraction]]:
        return [list(row[: self.n]) for row in self.rows[: self.n]]

    @property
    def b(self) -> List[Fraction]:
        return [row[self.n] for row in self.rows[: self.n]]

    @property
    def c(self) -> List[Fraction]:
        return list(self.rows[self.n][: self.n])

    @property
    def d(self) -> Fraction:
        return self.rows[self.n][self.n]

    @property
    def det(self) -> Fraction:
        return linsolve.determinant(self.rows)

    def matrix(self) -> List[List[Fraction]]:
        return [list(row) for row in self.rows]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.n != self.n:
            raise exp.DimensionError(
                f"Cannot multiply group elements of dimensions {self.n} and {other.n}"
            )
        return GroupElement(self.n, tuple(tuple(r) for r in linsolve.matmul(self.rows, other.rows)))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.n, tuple(tuple(r) for r in linsolve.inverse(self.rows)))

    def adjugate(self) -> List[List[Fraction]]:
        det = self.det
        return [[x * det for x in row] for row in linsolve.inverse(self.rows)]

    def is_block_upper_triangular(self) -> bool:
        return all(x == 0 for x in self.c)

    def denominator(self) -> MultiPoly:
        """s(m) = c^T m + d as a polynomial"""
        return MultiPoly.linear_form(self.c, self.d)

    def numerator_map(self) -> List[MultiPoly]:
        """The components of Am + b as polynomials"""
        return [MultiPoly.linear_form(row, bi) for row, bi in zip(self.A, self.b)]

    def to_text(self) -> str:
        return "[" + ", ".join(
            "[" + ", ".join(format_rational(x) for x in row) + "]" for row in self.rows
        ) + "]"


def _check_point(g: GroupElement, m: Point) -> List[Fraction]:
    if len(m) != g.n:
        raise exp.DimensionError(f"Point of length {len(m)} given to a group element with n={g.n}")
    return [as_fraction(x) for x in m]


def _denominator_at(g: GroupElement, m: List[Fraction]) -> Fraction:
    s = sum((ci * mi for ci, mi in zip(g.c, m)), Fraction(0)) + g.d
    if s == 0:
        raise exp.SingularError(
            f"The point {[format_rational(x) for x in m]} lies on the hyperplane c^T m + d = 0"
        )
    return s


def homography_eval(g: GroupElement, m: Point) -> List[Fraction]:
    """h_g(m) = (Am + b) / (c^T m + d)"""
    m = _check_point(g, m)
    s = _denominator_at(g, m)
    image = linsolve.matvec(g.A, m)
    return [(x + bi) / s for x, bi in zip(image, g.b)]


def homography_jacobian(g: GroupElement, m: Point) -> List[List[Fraction]]:
    """h'_g(m) = [(c^T m + d) A - (Am + b) c^T] / (c^T m + d)^2"""
    m = _check_point(g, m)
    s = _denominator_at(g, m)
    top = [x + bi for x, bi in zip(linsolve.matvec(g.A, m), g.b)]
    c = g.c
    A = g.A
    return [
        [(s * A[i][j] - top[i] * c[j]) / (s * s) for j in range(g.n)]
        for i in range(g.n)
    ]


class RationalMatrix(NamedTuple):
    """A matrix of rational functions sharing one denominator"""

    numerators: PolyMatrix
    denominator: MultiPoly

    def evaluate(self, point: Point) -> List[List[Fraction]]:
        den = self.denominator.evaluate(point)
        if den == 0:
            raise exp.SingularError("Denominator vanishes at the evaluation point")
        return [[x / den for x in row] for row in self.numerators.evaluate(point)]


def symbolic_jacobian(g: GroupElement) -> RationalMatrix:
    s = g.denominator()
    top = g.numerator_map()
    n = g.n
    c = g.c
    A = g.A
    entries = [[s * A[i][j] - top[i] * c[j] for j in range(n)] for i in range(n)]
    return RationalMatrix(PolyMatrix(entries, n), s * s)


def symbolic_jacobian_inverse(g: GroupElement) -> RationalMatrix:
    """
    (h'_g(m))^{-1} = s(m) (A' - m c'^T) where [[A', b'], [c'^T, d']] is
    g^{-1}. Written with the adjugate of g so that the numerators are
    polynomials over the constant denominator det(g).
    """
    n = g.n
    adj = g.adjugate()
    adj_A = [row[:n] for row in adj[:n]]
    adj_c = adj[n][:n]
    s = g.denominator()
    m = [MultiPoly.variable(n, i) for i in range(n)]
    entries = [
        [s * (MultiPoly.constant(n, adj_A[i][j]) - m[i] * adj_c[j]) for j in range(n)]
        for i in range(n)
    ]
    return RationalMatrix(PolyMatrix(entries, n), MultiPoly.constant(n, g.det))
