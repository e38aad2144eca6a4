"""
Exponent vectors k = (k_1, ..., k_n) stored as tuples of non-negative ints.
Everything that iterates over monomials uses the graded lexicographic order
defined here: lower total degree first, then m1 before m2 within a degree.
"""
from functools import lru_cache
from typing import Iterator, Sequence, Tuple

ExponentVector = Tuple[int, ...]


def degree(k: ExponentVector) -> int:
    return sum(k)


def grlex_key(k: ExponentVector):
    return (sum(k), tuple(-e for e in k))


def zero(n: int) -> ExponentVector:
    return (0,) * n


def unit(n: int, i: int) -> ExponentVector:
    return tuple(int(j == i) for j in range(n))


def add(a: ExponentVector, b: ExponentVector) -> ExponentVector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: ExponentVector, b: ExponentVector) -> ExponentVector:
    return tuple(x - y for x, y in zip(a, b))


def divides(a: ExponentVector, b: ExponentVector) -> bool:
    """True when z^a divides z^b, i.e. a <= b componentwise"""
    return all(x <= y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def of_degree(n: int, d: int) -> Tuple[ExponentVector, ...]:
    """All exponent vectors of total degree d, in grlex order"""
    if n == 0:
        return ((),) if d == 0 else ()
    if n == 1:
        return ((d,),)
    result = []
    for first in range(d, -1, -1):
        for rest in of_degree(n - 1, d - first):
            result.append((first,) + rest)
    return tuple(result)


def up_to(n: int, max_degree: int) -> Iterator[ExponentVector]:
    for d in range(max_degree + 1):
        yield from of_degree(n, d)


def in_box(k: ExponentVector) -> Iterator[ExponentVector]:
    """Every j with 0 <= j <= k componentwise"""
    if not k:
        yield ()
        return
    for first in range(k[0] + 1):
        for rest in in_box(k[1:]):
            yield (first,) + rest


def validate(k: Sequence[int], n: int) -> ExponentVector:
    k = tuple(int(e) for e in k)
    if len(k) != n:
        raise ValueError(f"Exponent vector {k} does not have length {n}")
    if any(e < 0 for e in k):
        raise ValueError(f"Exponent vector {k} has a negative entry")
    return k
