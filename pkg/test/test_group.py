from fractions import Fraction
import numpy as np
import pytest
import nefflow.common.exceptions as exp
import nefflow.algebra.linsolve as linsolve
from nefflow.group.decompose import (
    FLOAT_TOLERANCE,
    FactorizationBranch,
    GroupRegion,
    classify_region,
    coset_sign,
    decompose_affine_jorgensen,
    decompose_rank_one,
    permutation_conjugate,
    random_decomposition_target,
)
from nefflow.group.element import (
    GroupElement,
    homography_eval,
    homography_jacobian,
    symbolic_jacobian,
    symbolic_jacobian_inverse,
)

F = Fraction


def random_element(rng, n):
    while True:
        rows = [[F(int(x), int(y)) for x, y in zip(rng.integers(-3, 4, n + 1), rng.integers(1, 3, n + 1))]
                for _ in range(n + 1)]
        try:
            return GroupElement.from_rows(rows)
        except exp.SingularError:
            continue


def random_point(rng, n):
    return [F(int(x), 2) for x in rng.integers(-6, 7, n)]


class TestElement:
    def test_blocks(self):
        g = GroupElement.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
        assert g.A == [[1, 2], [4, 5]]
        assert g.b == [3, 6]
        assert g.c == [7, 8]
        assert g.d == 10

    def test_singular_refused(self):
        with pytest.raises(exp.SingularError):
            GroupElement.from_rows([[1, 2], [2, 4]])

    def test_bad_shape(self):
        with pytest.raises(exp.DimensionError):
            GroupElement(2, ((1, 0), (0, 1)))

    def test_g_bc_has_unit_determinant(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            b = [F(int(x)) for x in rng.integers(-3, 4, 3)]
            c = [F(int(x)) for x in rng.integers(-3, 4, 3)]
            if sum(x * y for x, y in zip(b, c)) == -1:
                continue
            assert GroupElement.g_bc(b, c).det == 1

    def test_inverse(self):
        g = GroupElement.from_rows([[2, 1], [1, 1]])
        assert g @ g.inverse() == GroupElement.identity(1)

    def test_to_text(self):
        assert GroupElement.from_rows([[F(1, 2), 0], [0, 1]]).to_text() == "[[1/2, 0], [0, 1]]"


class TestHomography:
    def test_inversion(self):
        g = GroupElement.from_rows([[0, 1], [1, 0]])
        assert homography_eval(g, [2]) == [F(1, 2)]
        assert homography_jacobian(g, [2]) == [[F(-1, 4)]]

    def test_hyperplane(self):
        g = GroupElement.from_rows([[1, 0], [1, 1]])
        with pytest.raises(exp.SingularError):
            homography_eval(g, [-1])

    def test_affine(self):
        g = GroupElement.affine([[2, 0], [1, 1]], [1, -1])
        assert homography_eval(g, [1, 2]) == [3, 2]

    def test_composition(self):
        rng = np.random.default_rng(0)
        checked = 0
        for _ in range(200):
            n = int(rng.integers(1, 4))
            g, g1 = random_element(rng, n), random_element(rng, n)
            m = random_point(rng, n)
            try:
                lhs = homography_eval(g1, homography_eval(g, m))
            except exp.SingularError:
                continue
            assert lhs == homography_eval(g1 @ g, m)
            checked += 1
        assert checked > 100

    def test_jacobian_chain_rule(self):
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(100):
            n = int(rng.integers(1, 4))
            g, g1 = random_element(rng, n), random_element(rng, n)
            m = random_point(rng, n)
            try:
                outer = homography_jacobian(g1, homography_eval(g, m))
                inner = homography_jacobian(g, m)
            except exp.SingularError:
                continue
            assert homography_jacobian(g1 @ g, m) == linsolve.matmul(outer, inner)
            checked += 1
        assert checked > 50

    def test_jacobian_inverse(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(1, 4))
            g = random_element(rng, n)
            m = random_point(rng, n)
            try:
                jac = homography_jacobian(g, m)
            except exp.SingularError:
                continue
            assert linsolve.determinant(jac) != 0
            inv = symbolic_jacobian_inverse(g).evaluate(m)
            assert linsolve.matmul(inv, jac) == linsolve.identity(n)
            assert symbolic_jacobian(g).evaluate(m) == jac

    def test_g_c_inverse_jacobian(self):
        c = [F(1), F(-2)]
        g = GroupElement.g_c(c)
        m = [F(1, 3), F(2)]
        s = c[0] * m[0] + c[1] * m[1] + 1
        expected = [[s * (int(i == j) + m[i] * c[j]) for j in range(2)] for i in range(2)]
        assert symbolic_jacobian_inverse(g).evaluate(m) == expected


class TestClassify:
    def test_g0(self):
        assert classify_region(GroupElement.from_rows([[2, 1], [0, 3]])) == GroupRegion.G0

    def test_not_tilde(self):
        assert classify_region(GroupElement.from_rows([[1, 0], [0, -1]])) == GroupRegion.NotTilde

    def test_h0(self):
        g = GroupElement.g_bc([1, 0], [-1, 0])
        assert classify_region(g) == GroupRegion.H0

    def test_definition_of_g0(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            g = random_element(rng, 2)
            is_g0 = all(x == 0 for x in g.c) and g.d > 0
            assert (classify_region(g) == GroupRegion.G0) == is_g0

    def test_coset_sign_agrees_with_factorization(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            g = random_decomposition_target(rng, int(rng.integers(1, 4)))
            if g is None or (g.d == 0 and linsolve.determinant(g.A) == 0):
                continue
            region = classify_region(g)
            expected = {1: GroupRegion.HPlus, -1: GroupRegion.HMinus, 0: GroupRegion.H0}[coset_sign(g)]
            assert region == expected


class TestDecompose:
    def test_affine_jorgensen(self):
        affine, jorgensen = decompose_affine_jorgensen(GroupElement.from_rows([[2, 4], [0, 2]]))
        assert affine == GroupElement.from_rows([[2, 2], [0, 1]])
        assert jorgensen == GroupElement.from_rows([[1, 0], [0, 2]])

    def test_affine_jorgensen_trivial(self):
        ident = GroupElement.identity(2)
        assert decompose_affine_jorgensen(ident) == (ident, ident)
        j = GroupElement.jorgensen(2, 3)
        assert decompose_affine_jorgensen(j) == (ident, j)

    def test_affine_jorgensen_outside_g0(self):
        with pytest.raises(exp.RegionError):
            decompose_affine_jorgensen(GroupElement.from_rows([[1, 0], [1, 1]]))

    def test_zero_block_closed_form(self):
        g = GroupElement.from_rows([[0, 2], [3, 1]])
        f = decompose_rank_one(g)
        assert f.branch == FactorizationBranch.ZERO_BLOCK
        assert f.factor() == GroupElement.from_rows([[0, 2], [F(-1, 2), 1]])
        assert f.g0 == GroupElement.from_rows([[-6, 0], [0, 1]])

    def test_schur_positive(self):
        g = GroupElement.from_blocks([[1, 0], [0, 1]], [0, 0], [1, 0], 1)
        f = decompose_rank_one(g)
        assert f.branch == FactorizationBranch.SCHUR_POSITIVE
        assert f.u == [0, 0]
        assert f.v == [1, 0]
        assert f.g0 == GroupElement.identity(2)

    def test_lambda_branch(self):
        # d = 0 and d - c^T A^{-1} b = -1 < 0
        g = GroupElement.from_blocks([[1, 0], [0, 1]], [1, 0], [1, 0], 0)
        f = decompose_rank_one(g)
        assert f.branch == FactorizationBranch.SCHUR_NEGATIVE_LAMBDA
        assert f.reconstruct() == g

    def test_upper_triangular_refused(self):
        with pytest.raises(exp.RegionError):
            decompose_rank_one(GroupElement.identity(2))

    def test_exact_round_trip(self):
        rng = np.random.default_rng(11)
        done = 0
        for _ in range(100):
            n = int(rng.integers(1, 4))
            g = random_decomposition_target(rng, n)
            if g is None or (g.d == 0 and linsolve.determinant(g.A) == 0):
                continue
            f = decompose_rank_one(g, exact_only=True)
            assert f.exact
            assert f.reconstruct() == g
            assert f.g0.is_block_upper_triangular() and f.g0.d > 0
            done += 1
        assert done > 50

    def test_singular_d_zero_exact_only(self):
        g = GroupElement.from_blocks([[1, 0], [0, 0]], [0, 1], [0, 1], 0)
        with pytest.raises(exp.DecompositionError):
            decompose_rank_one(g, exact_only=True)

    def test_float_branch(self):
        g = GroupElement.from_blocks([[1, 0], [0, 0]], [0, 1], [0, 1], 0)
        f = decompose_rank_one(g)
        assert f.branch == FactorizationBranch.SINGULAR_FLOAT
        assert f.residual(g) < FLOAT_TOLERANCE
        assert f.g0[2, 2] > 0

    def test_float_branch_random(self):
        rng = np.random.default_rng(13)
        done = 0
        for _ in range(40):
            g = random_decomposition_target(rng, int(rng.integers(2, 4)), singular=True)
            if g is None:
                continue
            try:
                f = decompose_rank_one(g)
            except exp.DecompositionError:
                continue
            assert f.residual(g) < FLOAT_TOLERANCE * max(1.0, np.linalg.norm(np.array(g.rows, dtype=float)))
            done += 1
        assert done > 0


class TestPermutation:
    def test_swap(self):
        g = GroupElement.g_bc([1, 0], [0, -1])
        assert permutation_conjugate(g, 1, 2) == GroupElement.g_bc([0, 1], [-1, 0])

    def test_identical_coordinates(self):
        g = GroupElement.g_bc([2, 2], [1, 1])
        assert permutation_conjugate(g, 1, 2) == g

    def test_malformed(self):
        with pytest.raises(exp.ArgError):
            permutation_conjugate(GroupElement.identity(2) @ GroupElement.jorgensen(2, 2), 1, 2)
        with pytest.raises(exp.ArgError):
            permutation_conjugate(GroupElement.g_bc([1, 0], [0, 1]), 2, 1)
