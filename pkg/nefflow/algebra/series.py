"""
Multivariate formal power series truncated at total degree D, with exact
rational coefficients, plus the vanishing-division kernel used to divide
by polynomials that vanish at the origin.
"""
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import nefflow.common.exceptions as exp
import nefflow.algebra.monomials as mono
import nefflow.algebra.linsolve as linsolve
from nefflow.algebra.monomials import ExponentVector
from nefflow.algebra.poly import MultiPoly

Scalar = Union[int, Fraction]
Terms = Dict[ExponentVector, Fraction]


def _by_degree(terms: Mapping[ExponentVector, Fraction]) -> Dict[int, List[Tuple[ExponentVector, Fraction]]]:
    grouped: Dict[int, List[Tuple[ExponentVector, Fraction]]] = {}
    for k, v in terms.items():
        grouped.setdefault(sum(k), []).append((k, v))
    return grouped


def _mul_terms(
    a: Mapping[ExponentVector, Fraction],
    b: Mapping[ExponentVector, Fraction],
    max_degree: int,
    box: Optional[ExponentVector] = None,
) -> Terms:
    """
    Product of two term maps keeping only |k| <= max_degree (and k <= box
    componentwise when a box is given)
    """
    if not a or not b:
        return {}
    b_grouped = _by_degree(b)
    out: Terms = {}
    for k1, v1 in a.items():
        d1 = sum(k1)
        for d2 in range(0, max_degree - d1 + 1):
            for k2, v2 in b_grouped.get(d2, ()):
                k = tuple(x + y for x, y in zip(k1, k2))
                if box is not None and any(x > y for x, y in zip(k, box)):
                    continue
                out[k] = out.get(k, 0) + v1 * v2
    return {k: v for k, v in out.items() if v}


class TruncSeries:
    """
    Power series in z_1..z_n known through total degree D. Every stored
    exponent vector satisfies |k| <= D; products drop everything above D.
    Instances are treated as immutable.
    """

    __slots__ = ("n", "D", "terms")

    def __init__(self, n: int, D: int, terms: Optional[Mapping[ExponentVector, Scalar]] = None):
        if D < 0:
            raise exp.ArgError(f"Truncation degree must be non-negative, got {D}")
        self.n = n
        self.D = D
        cleaned: Terms = {}
        if terms:
            for k, v in terms.items():
                k = tuple(k)
                if len(k) != n:
                    raise exp.DimensionError(f"Exponent vector {k} used in a series in {n} variables")
                if v and sum(k) <= D:
                    cleaned[k] = Fraction(v)
        self.terms = cleaned

    @classmethod
    def _raw(cls, n: int, D: int, terms: Terms) -> "TruncSeries":
        s = cls.__new__(cls)
        s.n = n
        s.D = D
        s.terms = terms
        return s

    @classmethod
    def zero(cls, n: int, D: int) -> "TruncSeries":
        return cls._raw(n, D, {})

    @classmethod
    def constant(cls, n: int, D: int, value: Scalar) -> "TruncSeries":
        return cls(n, D, {mono.zero(n): value})

    @classmethod
    def one(cls, n: int, D: int) -> "TruncSeries":
        return cls.constant(n, D, 1)

    @classmethod
    def variable(cls, n: int, i: int, D: int) -> "TruncSeries":
        return cls(n, D, {mono.unit(n, i): 1})

    @classmethod
    def from_poly(cls, p: MultiPoly, D: int) -> "TruncSeries":
        return cls._raw(p.n, D, {k: v for k, v in p.terms.items() if sum(k) <= D})

    def to_poly(self) -> MultiPoly:
        return MultiPoly(self.n, self.terms)

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            if other.n != self.n:
                raise exp.DimensionError(
                    f"Cannot combine series in {self.n} and {other.n} variables"
                )
            return other
        if isinstance(other, MultiPoly):
            return TruncSeries.from_poly(other, self.D)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return TruncSeries.constant(self.n, self.D, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, k: ExponentVector) -> Fraction:
        return self.terms.get(tuple(k), Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self.coefficient(mono.zero(self.n))

    def homogeneous_part(self, d: int) -> "TruncSeries":
        return TruncSeries._raw(self.n, self.D, {k: v for k, v in self.terms.items() if sum(k) == d})

    def truncate(self, D: int) -> "TruncSeries":
        """Same series known through a (lower or higher) degree D"""
        return TruncSeries._raw(self.n, D, {k: v for k, v in self.terms.items() if sum(k) <= D})

    def restrict_box(self, box: ExponentVector) -> "TruncSeries":
        """Keep only terms z^j with j <= box componentwise"""
        return TruncSeries._raw(
            self.n,
            self.D,
            {k: v for k, v in self.terms.items() if all(x <= y for x, y in zip(k, box))},
        )

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = min(self.D, other.D)
        terms = {k: v for k, v in self.terms.items() if sum(k) <= D}
        for k, v in other.terms.items():
            if sum(k) > D:
                continue
            s = terms.get(k, 0) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return TruncSeries._raw(self.n, D, terms)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.n, self.D, {k: -v for k, v in self.terms.items()})

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

    def scale(self, c: Scalar) -> "TruncSeries":
        c = Fraction(c)
        if not c:
            return TruncSeries.zero(self.n, self.D)
        return TruncSeries._raw(self.n, self.D, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = min(self.D, other.D)
        return TruncSeries._raw(self.n, D, _mul_terms(self.terms, other.terms, D))

    __rmul__ = __mul__

    def mul_in_box(self, other: "TruncSeries", box: ExponentVector) -> "TruncSeries":
        """Product restricted to monomials dividing z^box"""
        D = min(self.D, other.D, sum(box))
        return TruncSeries._raw(self.n, D, _mul_terms(self.terms, other.terms, D, box))

    def __pow__(self, e: int):
        return series_pow(self, e)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.n == other.n and self.D == other.D and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.D, frozenset(self.terms.items())))

    def agrees_with(self, other: "TruncSeries", through: int) -> bool:
        """Equality of all coefficients of total degree <= through"""
        mine = {k: v for k, v in self.terms.items() if sum(k) <= through}
        theirs = {k: v for k, v in other.terms.items() if sum(k) <= through}
        return mine == theirs

    def derivative(self, i: int) -> "TruncSeries":
        """d/dz_i; the result is only known through degree D - 1"""
        terms = {}
        for k, v in self.terms.items():
            if k[i]:
                terms[k[:i] + (k[i] - 1,) + k[i + 1 :]] = v * k[i]
        D = max(self.D - 1, 0)
        return TruncSeries._raw(self.n, D, {k: v for k, v in terms.items() if sum(k) <= D})

    def multiply_by_variable(self, i: int) -> "TruncSeries":
        """z_i * s, keeping the truncation degree"""
        terms = {}
        for k, v in self.terms.items():
            if sum(k) < self.D:
                terms[k[:i] + (k[i] + 1,) + k[i + 1 :]] = v
        return TruncSeries._raw(self.n, self.D, terms)

    def sorted_terms(self) -> List[Tuple[ExponentVector, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: mono.grlex_key(kv[0]))

    def to_text(self, var: str = "z") -> str:
        return f"{self.to_poly().to_text(var)} + O(|{var}|^{self.D + 1})"

    def __repr__(self):
        return f"TruncSeries(n={self.n}, D={self.D}, {self.to_poly().to_text('z')!r})"


class SeriesVector:
    """A vector of TruncSeries sharing (n, D)"""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[TruncSeries]):
        comps = tuple(components)
        if not comps:
            raise exp.DimensionError("A SeriesVector needs at least one component")
        shapes = {(c.n, c.D) for c in comps}
        if len(shapes) != 1:
            raise exp.DimensionError(
                f"SeriesVector components have different (n, D): {sorted(shapes)}"
            )
        self.components = comps

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def D(self) -> int:
        return self.components[0].D

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i: int) -> TruncSeries:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        if not isinstance(other, SeriesVector):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def truncate(self, D: int) -> "SeriesVector":
        return SeriesVector(c.truncate(D) for c in self.components)

    def constant_terms(self) -> List[Fraction]:
        return [c.constant_term for c in self.components]

    def __repr__(self):
        return f"SeriesVector({list(self.components)!r})"


def identity_vector(n: int, D: int) -> SeriesVector:
    return SeriesVector(TruncSeries.variable(n, i, D) for i in range(n))


def _homogeneous_parts(s: TruncSeries) -> List[Terms]:
    parts: List[Terms] = [dict() for _ in range(s.D + 1)]
    for k, v in s.terms.items():
        parts[sum(k)][k] = v
    return parts


def _require_zero_constant(s: TruncSeries, operation: str):
    if s.constant_term != 0:
        msg = f"""
        {operation} needs a series with zero constant term, got constant
        term {s.constant_term}. Factor the constant out before calling.
        """
        raise exp.ArgError(msg)


def series_exp(s: TruncSeries) -> TruncSeries:
    """
    exp(s) through degree D. Uses the graded recurrence obtained from the
    Euler operator: d*E_d = sum_{j=1..d} j*s_j*E_{d-j}, E_0 = 1.
    """
    _require_zero_constant(s, "series_exp")
    n, D = s.n, s.D
    s_parts = _homogeneous_parts(s)
    e_parts: List[Terms] = [{mono.zero(n): Fraction(1)}]
    for d in range(1, D + 1):
        acc: Terms = {}
        for j in range(1, d + 1):
            if not s_parts[j] or not e_parts[d - j]:
                continue
            prod = _mul_terms(s_parts[j], e_parts[d - j], d)
            for k, v in prod.items():
                acc[k] = acc.get(k, 0) + j * v
        e_parts.append({k: v / d for k, v in acc.items() if v})
    terms: Terms = {}
    for part in e_parts:
        terms.update(part)
    return TruncSeries._raw(n, D, terms)


def series_log1p(s: TruncSeries) -> TruncSeries:
    """
    log(1+s) through degree D, from (1+s)*theta(L) = theta(s) with theta
    the Euler operator: L_d = s_d - (1/d) sum_{j=1..d-1} (d-j) s_j L_{d-j}
    """
    _require_zero_constant(s, "series_log1p")
    n, D = s.n, s.D
    s_parts = _homogeneous_parts(s)
    l_parts: List[Terms] = [{}]
    for d in range(1, D + 1):
        acc: Terms = dict(s_parts[d])
        for j in range(1, d):
            if not s_parts[j] or not l_parts[d - j]:
                continue
            prod = _mul_terms(s_parts[j], l_parts[d - j], d)
            factor = Fraction(d - j, d)
            for k, v in prod.items():
                acc[k] = acc.get(k, 0) - factor * v
        l_parts.append({k: v for k, v in acc.items() if v})
    terms: Terms = {}
    for part in l_parts:
        terms.update(part)
    return TruncSeries._raw(n, D, terms)


def series_reciprocal(s: TruncSeries) -> TruncSeries:
    """1/s for a unit s (non-zero constant term)"""
    c0 = s.constant_term
    if c0 == 0:
        raise exp.ArgError("series_reciprocal needs a non-zero constant term")
    n, D = s.n, s.D
    s_parts = _homogeneous_parts(s)
    r_parts: List[Terms] = [{mono.zero(n): 1 / c0}]
    for d in range(1, D + 1):
        acc: Terms = {}
        for j in range(1, d + 1):
            if not s_parts[j] or not r_parts[d - j]:
                continue
            for k, v in _mul_terms(s_parts[j], r_parts[d - j], d).items():
                acc[k] = acc.get(k, 0) + v
        r_parts.append({k: -v / c0 for k, v in acc.items() if v})
    terms: Terms = {}
    for part in r_parts:
        terms.update(part)
    return TruncSeries._raw(n, D, terms)


def series_pow(s: TruncSeries, e: int, box: Optional[ExponentVector] = None) -> TruncSeries:
    """
    s**e by binary exponentiation. With a box, every intermediate product
    is restricted to monomials dividing z^box.
    """
    if not isinstance(e, int) or e < 0:
        raise ValueError("Series can only be raised to non-negative integer powers")

    def mul(a, b):
        return a.mul_in_box(b, box) if box is not None else a * b

    result = TruncSeries.one(s.n, s.D)
    base = s.restrict_box(box) if box is not None else s
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def series_compose(outer: TruncSeries, inner: SeriesVector) -> TruncSeries:
    """
    outer(inner_1(w), ..., inner_n(w)). The inner series must vanish at 0,
    so z^k contributes only from degree |k| on and the result is exact
    through min(outer.D, inner.D).
    """
    if len(inner) != outer.n:
        raise exp.DimensionError(
            f"Composing a series in {outer.n} variables with {len(inner)} inner series"
        )
    for i, comp in enumerate(inner):
        if comp.constant_term != 0:
            msg = f"""
            Inner series number {i + 1} has constant term {comp.constant_term};
            composition needs every inner series to vanish at 0.
            """
            raise exp.ArgError(msg)

    m, D = inner.n, min(outer.D, inner.D)
    inner_t = [c.truncate(D) for c in inner]
    # products[k] = inner^k, built from products[k - e_i] in grlex order
    products: Dict[ExponentVector, TruncSeries] = {mono.zero(outer.n): TruncSeries.one(m, D)}
    result: Terms = {}
    for k, v in sorted(outer.terms.items(), key=lambda kv: mono.grlex_key(kv[0])):
        if sum(k) > D:
            continue
        power = _monomial_power(products, k, inner_t)
        for kk, vv in power.terms.items():
            result[kk] = result.get(kk, 0) + v * vv
    return TruncSeries._raw(m, D, {k: v for k, v in result.items() if v})


def _monomial_power(
    products: Dict[ExponentVector, TruncSeries], k: ExponentVector, inner: List[TruncSeries]
) -> TruncSeries:
    if k in products:
        return products[k]
    i = max(idx for idx, e in enumerate(k) if e)
    previous = k[:i] + (k[i] - 1,) + k[i + 1 :]
    products[k] = _monomial_power(products, previous, inner) * inner[i]
    return products[k]


def series_det(mat: Sequence[Sequence[TruncSeries]]) -> TruncSeries:
    """Determinant by memoised Laplace expansion, truncating every product"""
    size = len(mat)
    if size == 0 or any(len(row) != size for row in mat):
        raise exp.DimensionError("series_det needs a non-empty square array")
    shapes = {(s.n, s.D) for row in mat for s in row}
    if len(shapes) != 1:
        raise exp.DimensionError(f"series_det entries have different (n, D): {sorted(shapes)}")
    n, D = shapes.pop()
    rows = tuple(tuple(row) for row in mat)

    @lru_cache(maxsize=None)
    def minor_det(row: int, cols: Tuple[int, ...]) -> TruncSeries:
        if row == size:
            return TruncSeries.one(n, D)
        total = TruncSeries.zero(n, D)
        for pos, col in enumerate(cols):
            entry = rows[row][col]
            if entry.is_zero():
                continue
            term = entry * minor_det(row + 1, cols[:pos] + cols[pos + 1 :])
            total = total + term if pos % 2 == 0 else total - term
        return total

    return minor_det(0, tuple(range(size)))


def series_matmul(
    a: Sequence[Sequence[TruncSeries]], b: Sequence[Sequence[TruncSeries]]
) -> List[List[TruncSeries]]:
    cols = list(zip(*b))
    result = []
    for row in a:
        new_row = []
        for col in cols:
            acc = row[0] * col[0]
            for x, y in zip(row[1:], col[1:]):
                acc = acc + x * y
            new_row.append(acc)
        result.append(new_row)
    return result


def series_solve_vanishing_div(q: MultiPoly, P: MultiPoly, D: int) -> TruncSeries:
    """
    The power series x with q*x = P through degree D + low(q), found one
    homogeneous degree at a time. With q = q_low + q_high, each piece x_d
    solves q_low * x_d = (P - q*x_{<d}) restricted to degree d + low(q).

    Raises NotAnalyticError when some degree gives an inconsistent system,
    which means P/q has no power series expansion at the origin.
    """
    if q.is_zero():
        raise exp.ArgError("series_solve_vanishing_div called with q = 0")
    if q.n != P.n:
        raise exp.DimensionError(f"q has {q.n} variables but P has {P.n}")
    n = q.n
    low = q.low_degree
    q_low = q.homogeneous_part(low)
    limit = D + low

    residual: Terms = {k: v for k, v in P.terms.items() if sum(k) <= limit}
    for k in residual:
        if sum(k) < low:
            msg = f"""
            {P.to_text()} divided by {q.to_text()} is not a power series:
            the numerator has a term of degree {sum(k)} below the order {low}
            of the denominator.
            """
            raise exp.NotAnalyticError(msg)

    x_terms: Terms = {}
    for d in range(D + 1):
        target = {k: v for k, v in residual.items() if sum(k) == d + low}
        x_d = _solve_homogeneous_piece(q_low, target, n, d, low)
        if x_d is None:
            msg = f"""
            {P.to_text()} divided by {q.to_text()} is not a power series:
            the linear system for the degree {d} coefficients is inconsistent.
            """
            raise exp.NotAnalyticError(msg)
        if not x_d:
            continue
        x_terms.update(x_d)
        for k, v in _mul_terms(q.terms, x_d, limit).items():
            s = residual.get(k, 0) - v
            if s:
                residual[k] = s
            else:
                residual.pop(k, None)

    return TruncSeries._raw(n, D, x_terms)


def _solve_homogeneous_piece(
    q_low: MultiPoly, target: Terms, n: int, d: int, low: int
) -> Optional[Terms]:
    if not target:
        return {}

    if len(q_low.terms) == 1:
        # Monomial leading part: divide termwise
        a, c = next(iter(q_low.terms.items()))
        piece = {}
        for k, v in target.items():
            if not mono.divides(a, k):
                return None
            piece[mono.sub(k, a)] = v / c
        return piece

    unknowns = mono.of_degree(n, d)
    columns = []
    rows_seen = dict.fromkeys(target)
    for u in unknowns:
        col = {}
        for a, c in q_low.terms.items():
            k = mono.add(a, u)
            col[k] = c
            rows_seen.setdefault(k, None)
        columns.append(col)
    row_keys = list(rows_seen)
    matrix = [[col.get(r, Fraction(0)) for col in columns] for r in row_keys]
    rhs = [target.get(r, Fraction(0)) for r in row_keys]
    solution = linsolve.solve_consistent(matrix, rhs)
    if solution is None:
        return None
    return {u: v for u, v in zip(unknowns, solution) if v}


def exact_quotient(P: MultiPoly, q: MultiPoly) -> MultiPoly:
    """
    P / q when q divides P exactly as polynomials; NotAnalyticError otherwise
    """
    if q.is_zero():
        raise exp.ArgError("Division by the zero polynomial")
    if P.is_zero():
        return MultiPoly.zero(P.n)
    if q.is_constant():
        return P.scale(1 / q.constant_term)
    if P.degree < q.degree:
        raise exp.NotAnalyticError(f"{q.to_text()} does not divide {P.to_text()}")
    x = series_solve_vanishing_div(q, P, P.degree - q.low_degree).to_poly()
    if x.degree > P.degree - q.degree or q * x != P:
        raise exp.NotAnalyticError(f"{q.to_text()} does not divide {P.to_text()}")
    return x


def series_reversion(F: SeriesVector) -> SeriesVector:
    """
    The compositional inverse H of F (F(H(w)) = w through degree D).
    F must vanish at 0 and have an invertible linear part L; the fixed
    point H <- L^{-1}(w - N(H)), with N the non-linear part of F, gains
    one correct degree per iteration.
    """
    n, D = F.n, F.D
    if len(F) != n:
        raise exp.DimensionError("series_reversion needs as many components as variables")
    linear = [[comp.coefficient(mono.unit(n, j)) for j in range(n)] for comp in F]
    try:
        l_inv = linsolve.inverse(linear)
    except exp.SingularError as e:
        raise exp.SingularError("The linear part of the series map is not invertible") from e

    nonlinear = []
    for comp in F:
        if comp.constant_term != 0:
            raise exp.ArgError("series_reversion needs a map vanishing at 0")
        nonlinear.append(
            TruncSeries._raw(n, D, {k: v for k, v in comp.terms.items() if sum(k) >= 2})
        )

    w = identity_vector(n, D)
    H = SeriesVector(_linear_combination(l_inv[i], list(w), n, D) for i in range(n))
    for _ in range(D):
        rhs = [w[i] - series_compose(nonlinear[i], H) for i in range(n)]
        new_H = SeriesVector(_linear_combination(l_inv[i], rhs, n, D) for i in range(n))
        if new_H == H:
            break
        H = new_H
    return H


def _linear_combination(coefficients: Sequence[Fraction], series: Sequence[TruncSeries], n: int, D: int) -> TruncSeries:
    acc = TruncSeries.zero(n, D)
    for c, s in zip(coefficients, series):
        if c:
            acc = acc + s.scale(c)
    return acc

