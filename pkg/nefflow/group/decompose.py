"""
Partition of G = GL(n+1) into G_0 and the cosets H_+G_0, H_-G_0, H_0G_0,
and the constructive factorizations g0 = affine * Jorgensen and
g = g_{u,v} g0 with g_{u,v} = [[I + uv^T, u], [v^T, 1]].
"""
import dataclasses
import enum
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union
import numpy as np
import nefflow.common.exceptions as exp
import nefflow.algebra.linsolve as linsolve
from nefflow.group.element import GroupElement

# Frobenius tolerance of the floating point branch
FLOAT_TOLERANCE = 1e-9


class GroupRegion(enum.Enum):
    G0 = "G0"
    HPlus = "HPlus"
    HMinus = "HMinus"
    H0 = "H0"
    TildeOther = "TildeOther"
    NotTilde = "NotTilde"


class FactorizationBranch(enum.Enum):
    ZERO_BLOCK = "zero_block"
    SCHUR_POSITIVE = "schur_positive"
    SCHUR_NEGATIVE_D = "schur_negative_d"
    SCHUR_NEGATIVE_LAMBDA = "schur_negative_lambda"
    SINGULAR_D = "singular_d"
    DETERMINANT_LEMMA = "determinant_lemma"
    SINGULAR_FLOAT = "singular_float"


@dataclasses.dataclass(frozen=True)
class RankOneFactorization:
    """
    g = [[I + uv^T, u], [v^T, 1]] g0 with g0 = [[A1, b1], [0, d1]], d1 > 0.

    In the exact branches u, v are lists of Fractions and g0 is a
    GroupElement; in the floating point branch they are numpy arrays.
    """

    u: Union[List[Fraction], np.ndarray]
    v: Union[List[Fraction], np.ndarray]
    g0: Union[GroupElement, np.ndarray]
    branch: FactorizationBranch

    @property
    def exact(self) -> bool:
        return self.branch != FactorizationBranch.SINGULAR_FLOAT

    def factor(self) -> Union[GroupElement, np.ndarray]:
        n = len(self.u)
        if self.exact:
            A = [[int(i == j) + self.u[i] * self.v[j] for j in range(n)] for i in range(n)]
            return GroupElement.from_blocks(A, self.u, self.v, 1)
        top = np.hstack([np.eye(n) + np.outer(self.u, self.v), np.reshape(self.u, (n, 1))])
        bottom = np.append(self.v, 1.0)
        return np.vstack([top, bottom])

    def reconstruct(self) -> Union[GroupElement, np.ndarray]:
        return self.factor() @ self.g0

    def residual(self, g: GroupElement) -> float:
        """Frobenius norm of (reconstruction - g); exactly 0 in the exact branches"""
        if self.exact:
            diff = linsolve.matmul(self.factor().rows, self.g0.rows)
            return math.sqrt(
                sum(float(x - y) ** 2 for r1, r2 in zip(diff, g.rows) for x, y in zip(r1, r2))
            )
        target = np.array([[float(x) for x in row] for row in g.rows])
        return float(np.linalg.norm(self.reconstruct() - target))

    @property
    def epsilon(self) -> int:
        """Sign of v^T u + 1, which selects the coset H_eps G_0"""
        value = sum(x * y for x, y in zip(self.v, self.u)) + 1
        if self.exact:
            return (value > 0) - (value < 0)
        if abs(value) < FLOAT_TOLERANCE:
            return 0
        return 1 if value > 0 else -1


def classify_region(g: GroupElement) -> GroupRegion:
    if g.is_block_upper_triangular():
        return GroupRegion.G0 if g.d > 0 else GroupRegion.NotTilde

    if _is_g_bc(g):
        b, c = g.b, g.c
        if sum(x * y for x, y in zip(c, b)) + 1 == 0:
            return GroupRegion.H0

    try:
        factorization = decompose_rank_one(g, exact_only=True)
    except exp.DecompositionError:
        return GroupRegion.TildeOther

    return {
        1: GroupRegion.HPlus,
        -1: GroupRegion.HMinus,
        0: GroupRegion.H0,
    }[factorization.epsilon]


def coset_sign(g: GroupElement) -> int:
    """
    Sign of v^T u + 1 without factorizing. From g = g_{u,v} g0 one gets
    det(A) = (v^T u + 1) det(A1) and det(g) = det(A1) d1 with d1 > 0, so the
    sign is that of det(A) det(g).
    """
    if g.is_block_upper_triangular():
        raise exp.RegionError("coset_sign needs an element with c != 0")
    value = linsolve.determinant(g.A) * g.det
    return (value > 0) - (value < 0)


def decompose_affine_jorgensen(g0: GroupElement) -> Tuple[GroupElement, GroupElement]:
    """
    [[A, b], [0, d]] = [[A, b/d], [0, 1]] [[I, 0], [0, d]] for d > 0
    """
    if not g0.is_block_upper_triangular() or g0.d <= 0:
        msg = f"""
        decompose_affine_jorgensen needs an element of G_0 (c = 0 and d > 0),
        got {g0.to_text()}.
        """
        raise exp.RegionError(msg)
    d = g0.d
    affine = GroupElement.affine(g0.A, [x / d for x in g0.b])
    jorgensen = GroupElement.jorgensen(g0.n, d)
    return affine, jorgensen


def decompose_rank_one(g: GroupElement, exact_only: bool = False) -> RankOneFactorization:
    """
    Factor g = g_{u,v} g0 with g0 in G_0, following the case split on the
    block A:
      - n = 1 and A = 0: closed form
      - A invertible and sigma = d - c^T A^{-1} b > 0: u = 0
      - A invertible, sigma < 0, d > 0: u = b/d, b1 = 0
      - A invertible, sigma < 0, d = 0: u = lambda A c with lambda c^T c > 1
      - A singular (rank n-1), d > 0: u = b/d, b1 = 0
      - A singular, d = 0: singular value factorization in floating point
    The remaining sign cases (d < 0) use u proportional to adj(A)^T c, which
    makes det(A - uc^T) = det(g) and hence d1 = 1.

    exact_only: refuse the floating point branch with DecompositionError.
    """
    if g.is_block_upper_triangular():
        raise exp.RegionError(
            "decompose_rank_one needs c != 0; block upper triangular elements are already in G_0 "
            "or outside the tilde set"
        )
    n = g.n
    A, b, c, d = g.A, g.b, g.c, g.d
    det_A = linsolve.determinant(A)

    if n == 1 and A[0][0] == 0:
        b0, c0 = b[0], c[0]
        u = [b0]
        v = [-1 / b0]
        g0 = GroupElement.from_rows([[-b0 * c0, b0 * (1 - d)], [0, 1]])
        return _checked(g, u, v, g0, FactorizationBranch.ZERO_BLOCK)

    if det_A != 0:
        A_inv = linsolve.inverse(A)
        sigma = d - _dot(c, linsolve.matvec(A_inv, b))
        if sigma > 0:
            u = [Fraction(0)] * n
            v = linsolve.matvec(linsolve.transpose(A_inv), c)
            g0 = GroupElement.from_blocks(A, b, [0] * n, sigma)
            return _checked(g, u, v, g0, FactorizationBranch.SCHUR_POSITIVE)
        if d > 0:
            return _divide_by_corner(g, FactorizationBranch.SCHUR_NEGATIVE_D)
        if d == 0:
            lam = math.floor(1 / _dot(c, c)) + 1
            u = [lam * x for x in linsolve.matvec(A, c)]
            return _from_u(g, u, FactorizationBranch.SCHUR_NEGATIVE_LAMBDA)
        return _determinant_lemma(g)

    if d > 0:
        return _divide_by_corner(g, FactorizationBranch.SINGULAR_D)
    if d < 0:
        return _determinant_lemma(g)
    if exact_only:
        raise exp.DecompositionError(
            "The singular, d = 0 case is only available in floating point"
        )
    return _singular_float(g)


def _dot(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def _from_u(g: GroupElement, u: List[Fraction], branch: FactorizationBranch) -> RankOneFactorization:
    """
    Complete a factorization once u is chosen: A1 = A - uc^T, b1 = b - ud,
    v^T = c^T A1^{-1}, d1 = d - v^T b1
    """
    n = g.n
    A, b, c, d = g.A, g.b, g.c, g.d
    A1 = [[A[i][j] - u[i] * c[j] for j in range(n)] for i in range(n)]
    b1 = [b[i] - u[i] * d for i in range(n)]
    try:
        A1_inv = linsolve.inverse(A1)
    except exp.SingularError as e:
        raise exp.DecompositionError(f"A - uc^T is singular in the {branch.value} branch") from e
    v = linsolve.matvec(linsolve.transpose(A1_inv), c)
    d1 = d - _dot(v, b1)
    if d1 <= 0:
        raise exp.DecompositionError(
            f"The {branch.value} branch produced a corner d1 = {d1} that is not positive"
        )
    g0 = GroupElement.from_blocks(A1, b1, [0] * n, d1)
    return _checked(g, u, v, g0, branch)


def _divide_by_corner(g: GroupElement, branch: FactorizationBranch) -> RankOneFactorization:
    d = g.d
    return _from_u(g, [x / d for x in g.b], branch)


def _determinant_lemma(g: GroupElement) -> RankOneFactorization:
    # det(A - uc^T) = det(A) - w^T u with w = adj(A)^T c, and w != 0 for c != 0
    A = g.A
    w = linsolve.matvec(linsolve.transpose(linsolve.adjugate(A)), g.c)
    ww = _dot(w, w)
    if ww == 0:
        raise exp.DecompositionError("adj(A)^T c vanishes; g cannot be invertible")
    t = (linsolve.determinant(A) - g.det) / ww
    return _from_u(g, [t * x for x in w], FactorizationBranch.DETERMINANT_LEMMA)


def _checked(
    g: GroupElement, u, v, g0: GroupElement, branch: FactorizationBranch
) -> RankOneFactorization:
    factorization = RankOneFactorization(u=list(u), v=list(v), g0=g0, branch=branch)
    if g0.d <= 0 or not g0.is_block_upper_triangular():
        raise exp.DecompositionError(f"The {branch.value} branch left G_0")
    if factorization.reconstruct() != g:
        raise exp.DecompositionError(f"The {branch.value} branch does not reproduce g")
    return factorization


def _singular_float(g: GroupElement) -> RankOneFactorization:
    """
    Rank n-1 block A with d = 0. Writing A = U diag(s) V^T, the conjugated
    element has a diagonal block with a zero last entry; there
    u' = (0, ..., 0, lambda) and lambda = b'_n gives d1 = 1.
    """
    n = g.n
    M = np.array([[float(x) for x in row] for row in g.rows])
    A, b, c = M[:n, :n], M[:n, n], M[n, :n]
    U, s, Vt = np.linalg.svd(A)
    scale = max(s[0], 1.0)
    if s[-1] > FLOAT_TOLERANCE * scale or (n > 1 and s[-2] <= FLOAT_TOLERANCE * scale):
        raise exp.DecompositionError(
            f"Numerical rank of A is ambiguous (singular values {s.tolist()})"
        )
    diag = np.diag(np.append(s[:-1], 0.0))
    b_prime = U.T @ b
    c_prime = Vt @ c
    if abs(b_prime[-1]) <= FLOAT_TOLERANCE or abs(c_prime[-1]) <= FLOAT_TOLERANCE:
        raise exp.DecompositionError(
            "The rotated element has a vanishing last coordinate; g is numerically singular"
        )

    u_prime = np.zeros(n)
    u_prime[-1] = b_prime[-1]
    A1_prime = diag - np.outer(u_prime, c_prime)
    v_prime = np.linalg.solve(A1_prime.T, c_prime)
    d1 = -float(v_prime @ b_prime)

    g0 = np.zeros((n + 1, n + 1))
    g0[:n, :n] = U @ A1_prime @ Vt
    g0[:n, n] = U @ b_prime
    g0[n, n] = d1
    factorization = RankOneFactorization(
        u=U @ u_prime, v=U @ v_prime, g0=g0, branch=FactorizationBranch.SINGULAR_FLOAT
    )
    residual = factorization.residual(g)
    if d1 <= 0 or residual > FLOAT_TOLERANCE * max(1.0, float(np.linalg.norm(M))):
        raise exp.DecompositionError(
            f"Floating point factorization failed (d1 = {d1}, residual = {residual})"
        )
    return factorization


def _is_g_bc(g: GroupElement) -> bool:
    if g.d != 1:
        return False
    b, c, A = g.b, g.c, g.A
    n = g.n
    return all(A[i][j] == int(i == j) + b[i] * c[j] for i in range(n) for j in range(n))


def permutation_conjugate(g_bc: GroupElement, i: int, j: int) -> GroupElement:
    """
    g_{Pb, Pc} for P the transposition of coordinates i and j (1-indexed)
    """
    if not _is_g_bc(g_bc):
        raise exp.ArgError(f"{g_bc.to_text()} is not of the form [[I + bc^T, b], [c^T, 1]]")
    n = g_bc.n
    if not 1 <= i < j <= n:
        raise exp.ArgError(f"Transposition indices must satisfy 1 <= i < j <= {n}, got ({i}, {j})")
    b, c = g_bc.b, g_bc.c
    for vec in (b, c):
        vec[i - 1], vec[j - 1] = vec[j - 1], vec[i - 1]
    return GroupElement.g_bc(b, c)


def random_decomposition_target(
    rng: np.random.Generator, n: int, singular: bool = False, magnitude: int = 5
) -> Optional[GroupElement]:
    """
    Draw a rational element with c != 0 for the factorization suites; with
    singular=True the block A has rank n-1 and d = 0. Returns None for an
    unlucky singular draw.
    """
    def draw(size):
        return [Fraction(int(x)) for x in rng.integers(-magnitude, magnitude + 1, size=size)]

    if singular:
        left = [draw(n - 1) for _ in range(n)]
        right = [draw(n - 1) for _ in range(n)]
        A = [[_dot(left[i], right[j]) for j in range(n)] for i in range(n)]
        d = Fraction(0)
    else:
        A = [draw(n) for _ in range(n)]
        d = draw(1)[0]
    b = draw(n)
    c = draw(n)
    if all(x == 0 for x in c):
        c[0] = Fraction(1)
    try:
        return GroupElement.from_blocks(A, b, c, d)
    except exp.SingularError:
        return None
