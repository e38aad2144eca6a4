"""
Multivariate polynomials with exact rational coefficients, and square
matrices of them. A variance function V(m) is a symmetric PolyMatrix.
"""
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import nefflow.common.exceptions as exp
import nefflow.algebra.monomials as mono
from nefflow.algebra.monomials import ExponentVector
from nefflow.algebra.rational import format_rational

Scalar = Union[int, Fraction]


class MultiPoly:
    """
    Polynomial in n variables, stored as a map from exponent vectors to
    non-zero Fractions. Instances are treated as immutable: every operation
    returns a new polynomial.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[ExponentVector, Scalar]] = None):
        self.n = n
        cleaned: Dict[ExponentVector, Fraction] = {}
        if terms:
            for k, v in terms.items():
                if v:
                    if len(k) != n:
                        raise exp.DimensionError(
                            f"Exponent vector {k} used in a polynomial in {n} variables"
                        )
                    cleaned[k] = Fraction(v)
        self.terms = cleaned

    @classmethod
    def _raw(cls, n: int, terms: Dict[ExponentVector, Fraction]) -> "MultiPoly":
        # Caller guarantees Fraction values, no zeros, correct lengths
        p = cls.__new__(cls)
        p.n = n
        p.terms = terms
        return p

    @classmethod
    def zero(cls, n: int) -> "MultiPoly":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, value: Scalar) -> "MultiPoly":
        return cls(n, {mono.zero(n): value})

    @classmethod
    def one(cls, n: int) -> "MultiPoly":
        return cls.constant(n, 1)

    @classmethod
    def variable(cls, n: int, i: int) -> "MultiPoly":
        """The coordinate m_{i+1} (0-based index i)"""
        if not 0 <= i < n:
            raise exp.DimensionError(f"Variable index {i} out of range for n={n}")
        return cls._raw(n, {mono.unit(n, i): Fraction(1)})

    @classmethod
    def linear_form(cls, coefficients: Sequence[Scalar], constant: Scalar = 0) -> "MultiPoly":
        """constant + sum_i coefficients[i] * m_{i+1}"""
        n = len(coefficients)
        terms = {mono.unit(n, i): c for i, c in enumerate(coefficients)}
        terms[mono.zero(n)] = constant
        return cls(n, terms)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.n != self.n:
                raise exp.DimensionError(
                    f"Cannot combine polynomials in {self.n} and {other.n} variables"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly.constant(self.n, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(k) == 0 for k in self.terms)

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1"""
        if not self.terms:
            return -1
        return max(sum(k) for k in self.terms)

    @property
    def low_degree(self) -> int:
        """Lowest total degree among the stored terms; -1 for zero"""
        if not self.terms:
            return -1
        return min(sum(k) for k in self.terms)

    def coefficient(self, k: ExponentVector) -> Fraction:
        return self.terms.get(tuple(k), Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self.coefficient(mono.zero(self.n))

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly._raw(self.n, {k: v for k, v in self.terms.items() if sum(k) == d})

    def truncate(self, max_degree: int) -> "MultiPoly":
        return MultiPoly._raw(
            self.n, {k: v for k, v in self.terms.items() if sum(k) <= max_degree}
        )

    def sorted_terms(self) -> List[Tuple[ExponentVector, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: mono.grlex_key(kv[0]))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, v in other.terms.items():
            s = terms.get(k, 0) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return MultiPoly._raw(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c: Scalar) -> "MultiPoly":
        c = Fraction(c)
        if not c:
            return MultiPoly.zero(self.n)
        return MultiPoly._raw(self.n, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[ExponentVector, Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                terms[k] = terms.get(k, 0) + v1 * v2
        return MultiPoly._raw(self.n, {k: v for k, v in terms.items() if v})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("Polynomials can only be raised to non-negative integer powers")
        result = MultiPoly.one(self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = MultiPoly.constant(self.n, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.n:
            raise exp.DimensionError(
                f"Point of length {len(point)} given to a polynomial in {self.n} variables"
            )
        point = [Fraction(x) for x in point]
        total = Fraction(0)
        for k, v in self.terms.items():
            term = v
            for x, e in zip(point, k):
                if e:
                    term *= x**e
            total += term
        return total

    def derivative(self, i: int) -> "MultiPoly":
        terms = {}
        for k, v in self.terms.items():
            if k[i]:
                dk = k[:i] + (k[i] - 1,) + k[i + 1 :]
                terms[dk] = v * k[i]
        return MultiPoly._raw(self.n, terms)

    def substitute(self, values: Sequence["MultiPoly"]) -> "MultiPoly":
        """
        Replace m_i by values[i]; the result lives in the ring of the values
        """
        if len(values) != self.n:
            raise exp.DimensionError(
                f"Substitution needs {self.n} polynomials, got {len(values)}"
            )
        target_n = values[0].n if values else 0
        cache: Dict[Tuple[int, int], MultiPoly] = {}

        def power(i: int, e: int) -> MultiPoly:
            if (i, e) not in cache:
                cache[(i, e)] = values[i] ** e
            return cache[(i, e)]

        result = MultiPoly.zero(target_n)
        for k, v in self.terms.items():
            term = MultiPoly.constant(target_n, v)
            for i, e in enumerate(k):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def to_text(self, var: str = "m") -> str:
        if not self.terms:
            return "0"
        pieces = []
        for k, v in self.sorted_terms():
            factors = [
                f"{var}{i + 1}" if e == 1 else f"{var}{i + 1}^{e}"
                for i, e in enumerate(k)
                if e
            ]
            magnitude = abs(v)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = format_rational(magnitude) + "*" + "*".join(factors)
            sign = "-" if v < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MultiPoly(n={self.n}, {self.to_text()!r})"


def poly_parse(text: str, n: int) -> MultiPoly:
    """Parse text over m1..mn into the canonical polynomial"""
    # Imported here to keep parser -> poly the only import direction
    from nefflow.algebra.parser import parse_polynomial

    return parse_polynomial(text, n)


def poly_eval(p: MultiPoly, point: Sequence[Scalar]) -> Fraction:
    return p.evaluate(point)


def common_dimension(polys: Iterable[MultiPoly]) -> int:
    dims = {p.n for p in polys}
    if len(dims) != 1:
        raise exp.DimensionError(f"Polynomials of mixed dimensions {sorted(dims)}")
    return dims.pop()


class PolyMatrix:
    """
    Square matrix of MultiPoly entries, all in the same n variables.
    The matrix size equals n for variance functions, but products of
    Jacobian factors pass through here as well, so symmetry is checked
    on request with is_symmetric() rather than enforced.
    """

    __slots__ = ("n", "size", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]], n: Optional[int] = None):
        rows = tuple(tuple(row) for row in entries)
        size = len(rows)
        if any(len(row) != size for row in rows):
            raise exp.DimensionError("PolyMatrix entries must form a square array")
        if n is None:
            if not size:
                raise exp.DimensionError("Cannot infer the dimension of an empty PolyMatrix")
            n = rows[0][0].n
        if any(p.n != n for row in rows for p in row):
            raise exp.DimensionError(f"All PolyMatrix entries must be polynomials in {n} variables")
        self.n = n
        self.size = size
        self.entries = rows

    @classmethod
    def from_scalars(cls, rows: Sequence[Sequence[Scalar]], n: int) -> "PolyMatrix":
        return cls([[MultiPoly.constant(n, x) for x in row] for row in rows], n)

    @classmethod
    def identity(cls, n: int, size: Optional[int] = None) -> "PolyMatrix":
        size = n if size is None else size
        return cls.from_scalars([[int(i == j) for j in range(size)] for i in range(size)], n)

    @classmethod
    def zero(cls, n: int, size: Optional[int] = None) -> "PolyMatrix":
        size = n if size is None else size
        return cls([[MultiPoly.zero(n)] * size for _ in range(size)], n)

    @classmethod
    def diagonal(cls, diag: Sequence[MultiPoly]) -> "PolyMatrix":
        n = common_dimension(diag)
        size = len(diag)
        return cls(
            [[diag[i] if i == j else MultiPoly.zero(n) for j in range(size)] for i in range(size)],
            n,
        )

    @classmethod
    def outer(cls, u: Sequence[MultiPoly], v: Sequence[MultiPoly]) -> "PolyMatrix":
        return cls([[a * b for b in v] for a in u])

    def __getitem__(self, ij: Tuple[int, int]) -> MultiPoly:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> List[List[MultiPoly]]:
        return [list(row) for row in self.entries]

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(p) for p in row] for row in self.entries], self.n)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(col) for col in zip(*self.entries)], self.n)

    def is_symmetric(self) -> bool:
        return all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.size)
            for j in range(i + 1, self.size)
        )

    def _check_same_shape(self, other: "PolyMatrix"):
        if other.size != self.size or other.n != self.n:
            raise exp.DimensionError("PolyMatrix operands have different shapes")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same_shape(other)
        return PolyMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            self.n,
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same_shape(other)
        return PolyMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            self.n,
        )

    def __neg__(self) -> "PolyMatrix":
        return self.map(lambda p: -p)

    def __mul__(self, other):
        """Matrix product with a PolyMatrix, entrywise scaling otherwise"""
        if isinstance(other, PolyMatrix):
            if other.size != self.size:
                raise exp.DimensionError("PolyMatrix product with incompatible sizes")
            cols = list(zip(*other.entries))
            result = []
            for row in self.entries:
                new_row = []
                for col in cols:
                    acc = MultiPoly.zero(self.n)
                    for a, b in zip(row, col):
                        if a.terms and b.terms:
                            acc = acc + a * b
                    new_row.append(acc)
                result.append(new_row)
            return PolyMatrix(result, self.n)
        return self.map(lambda p: p * other)

    __rmul__ = __mul__

    def matvec(self, vec: Sequence[MultiPoly]) -> List[MultiPoly]:
        result = []
        for row in self.entries:
            acc = MultiPoly.zero(self.n)
            for a, b in zip(row, vec):
                acc = acc + a * b
            result.append(acc)
        return result

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, self.entries))

    @property
    def max_degree(self) -> int:
        return max(p.degree for row in self.entries for p in row)

    def evaluate(self, point: Sequence[Scalar]) -> List[List[Fraction]]:
        return [[p.evaluate(point) for p in row] for row in self.entries]

    def derivative(self, i: int) -> "PolyMatrix":
        return self.map(lambda p: p.derivative(i))

    def determinant(self) -> MultiPoly:
        return _laplace_determinant(self.entries, self.n)

    def adjugate(self) -> "PolyMatrix":
        size = self.size
        if size == 1:
            return PolyMatrix([[MultiPoly.one(self.n)]], self.n)
        adj = [[None] * size for _ in range(size)]
        for i in range(size):
            for j in range(size):
                minor = tuple(
                    tuple(self.entries[r][c] for c in range(size) if c != j)
                    for r in range(size)
                    if r != i
                )
                cofactor = _laplace_determinant(minor, self.n)
                adj[j][i] = cofactor if (i + j) % 2 == 0 else -cofactor
        return PolyMatrix(adj, self.n)

    def to_text(self, var: str = "m") -> List[List[str]]:
        return [[p.to_text(var) for p in row] for row in self.entries]

    def __repr__(self):
        return f"PolyMatrix(n={self.n}, {self.to_text()!r})"


def _laplace_determinant(entries: Tuple[Tuple[MultiPoly, ...], ...], n: int) -> MultiPoly:
    """
    Determinant by Laplace expansion along rows, memoised on the set of
    remaining columns. Exact and division-free.
    """
    size = len(entries)
    if size == 0:
        return MultiPoly.one(n)

    @lru_cache(maxsize=None)
    def minor_det(row: int, cols: Tuple[int, ...]) -> MultiPoly:
        if row == size:
            return MultiPoly.one(n)
        total = MultiPoly.zero(n)
        for pos, col in enumerate(cols):
            entry = entries[row][col]
            if entry.is_zero():
                continue
            rest = minor_det(row + 1, cols[:pos] + cols[pos + 1 :])
            term = entry * rest
            total = total + term if pos % 2 == 0 else total - term
        return total

    return minor_det(0, tuple(range(size)))
