"""
Exact Gaussian elimination over the rationals. Matrices are lists of rows
of Fractions. row_echelon reduces its arguments in place; every other
function works on a copy and leaves its inputs untouched.
"""
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple
import nefflow.common.exceptions as exp

Matrix = List[List[Fraction]]


def copy_matrix(m: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in m]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    inner = len(b)
    if any(len(row) != inner for row in a):
        raise exp.DimensionError("Matrix product with incompatible shapes")
    cols = len(b[0]) if inner else 0
    return [
        [sum((row[k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
        for row in a
    ]


def matvec(a: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> List[Fraction]:
    return [sum((r * v for r, v in zip(row, x)), Fraction(0)) for row in a]


def transpose(a: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(col) for col in zip(*a)]


def row_echelon(m: Matrix, t: Optional[List[Fraction]] = None) -> List[int]:
    """
    Reduce m (and the right-hand side t, if given) to row echelon form in
    place. Returns the list of free (pivot-less) columns.
    """
    free_vars = []
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    piv_r = 0
    for piv_c in range(n_cols):
        pivot_row = None
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                pivot_row = i_row
                break
        if pivot_row is None:
            free_vars.append(piv_c)
            continue
        if pivot_row != piv_r:
            m[piv_r], m[pivot_row] = m[pivot_row], m[piv_r]
            if t is not None:
                t[piv_r], t[pivot_row] = t[pivot_row], t[piv_r]
        fp = m[piv_r][piv_c]
        for r in range(piv_r + 1, n_rows):
            fr = m[r][piv_c]
            if fr == 0:
                continue
            frp = fr / fp
            row_r = m[r]
            row_p = m[piv_r]
            for c in range(piv_c, n_cols):
                if row_p[c]:
                    row_r[c] -= row_p[c] * frp
            if t is not None:
                t[r] -= t[piv_r] * frp
        piv_r += 1
    return free_vars


def solve_consistent(
    m: Sequence[Sequence[Fraction]], t: Sequence[Fraction]
) -> Optional[List[Fraction]]:
    """
    Solve m x = t exactly. Free variables are set to 0. Returns None when
    the (possibly overdetermined) system is inconsistent.
    """
    work = copy_matrix(m)
    rhs = [Fraction(v) for v in t]
    n_rows = len(work)
    n_cols = len(work[0]) if n_rows else 0
    free_vars = row_echelon(work, rhs)
    rank = n_cols - len(free_vars)
    for r in range(rank, n_rows):
        if rhs[r] != 0:
            return None

    free = set(free_vars)
    piv_cols = [c for c in range(n_cols) if c not in free]
    sol = [Fraction(0)] * n_cols
    for r in range(len(piv_cols) - 1, -1, -1):
        piv_c = piv_cols[r]
        s = -rhs[r]
        for c in range(piv_c + 1, n_cols):
            if work[r][c]:
                s += work[r][c] * sol[c]
        sol[piv_c] = -s / work[r][piv_c]
    return sol


def determinant(m: Sequence[Sequence[Fraction]]) -> Fraction:
    work = copy_matrix(m)
    n = len(work)
    if any(len(row) != n for row in work):
        raise exp.DimensionError("Determinant of a non-square matrix")
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det *= work[col][col]
        for r in range(col + 1, n):
            f = work[r][col] / work[col][col]
            if f:
                for c in range(col, n):
                    work[r][c] -= f * work[col][c]
    return det


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    if not m:
        return 0
    work = copy_matrix(m)
    return len(work[0]) - len(row_echelon(work))


def inverse(m: Sequence[Sequence[Fraction]]) -> Matrix:
    """
    Gauss-Jordan inverse. Raises SingularError when m is not invertible.
    """
    n = len(m)
    work = [list(row) + ident for row, ident in zip(copy_matrix(m), identity(n))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise exp.SingularError("Matrix is singular and has no inverse")
        work[col], work[pivot] = work[pivot], work[col]
        p = work[col][col]
        work[col] = [x / p for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def adjugate(m: Sequence[Sequence[Fraction]]) -> Matrix:
    """
    adj(m) such that m adj(m) = det(m) I, computed by cofactors
    """
    n = len(m)
    if n == 1:
        return [[Fraction(1)]]
    adj = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [m[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * determinant(minor)
    return adj


def shape(m: Sequence[Sequence]) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)
