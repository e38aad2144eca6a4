from fractions import Fraction
import numpy as np
import pytest
import nefflow.common.exceptions as exp
from nefflow.algebra.parser import parse_polynomial
from nefflow.algebra.poly import MultiPoly, PolyMatrix
from nefflow.catalog.cubic import (
    CubicOrbit,
    binary_cubic_discriminant,
    classify_cubic_orbit_n1,
    morris_fingerprint,
)
from nefflow.catalog.families import (
    CasalisFamily,
    all_casalis,
    casalis_representative,
    family_from_label,
    morris_representatives,
)
from nefflow.catalog.witnesses import (
    check_Ik_chain,
    partial_ones_obstruction,
    run_Ik_chain,
    witness_Ik_chain,
    witness_II_to_III,
)
from nefflow.group.element import GroupElement
from nefflow.transform.action import transform_variance, transform_variance_cubic_n1
from nefflow.transform.conditions import check_prop34_symmetry, decompose_simple_quadratic

F = Fraction


def poly(text, n):
    return parse_polynomial(text, n)


class TestCasalis:
    def test_gaussian_poisson(self):
        spec = casalis_representative(CasalisFamily("I", 3, 2))
        assert spec.V == PolyMatrix.diagonal([poly("m1", 3), poly("m2", 3), poly("1", 3)])
        assert spec.domain == "(0,inf)^2 x R"

    def test_multinomial(self):
        spec = casalis_representative(CasalisFamily("II", 2))
        assert spec.V.to_text() == [["m1 - m1^2", "-m1*m2"], ["-m1*m2", "m2 - m2^2"]]

    def test_hyperbolic(self):
        spec = casalis_representative(CasalisFamily("V", 2))
        assert spec.V[0, 0] == poly("m1 + m1^2", 2)
        assert spec.V[1, 1] == poly("1 + m1 + m2^2", 2)
        assert spec.V[0, 1] == poly("m1*m2", 2)

    def test_negative_multinomial_type_iv(self):
        spec = casalis_representative(CasalisFamily("IV", 3, 2))
        assert spec.V[0, 0] == poly("m1^2", 3)
        assert spec.V[1, 1] == poly("m2 + m2^2", 3)
        assert spec.V[2, 2] == poly("m1 + m3^2", 3)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_count(self, n):
        families = all_casalis(n)
        assert len(families) == 2 * n + 4
        assert len({f.label for f in families}) == 2 * n + 4

    @pytest.mark.parametrize(
        "tag,n,k", [("VI", 2, None), ("I", 2, 3), ("IV", 2, 0), ("II", 2, 1), ("I", 0, 0), ("IV", 2, None)]
    )
    def test_invalid(self, tag, n, k):
        with pytest.raises(exp.ArgError):
            CasalisFamily(tag, n, k)

    def test_labels(self):
        assert family_from_label("IV_1", 2) == CasalisFamily("IV", 2, 1)
        assert family_from_label("III", 3) == CasalisFamily("III", 3)
        with pytest.raises(exp.ArgError):
            family_from_label("I_x", 2)


class TestMorris:
    def test_table(self):
        entries = morris_representatives()
        assert [name for _, name in entries] == [
            "Normal", "Poisson", "Gamma", "Binomial", "NegBinomial", "Hyperbolic"
        ]
        binomial, _ = entries[3]
        assert binomial.V[0, 0] == poly("m1 - m1^2", 1)
        assert binomial.domain == "(0,1)"
        normal, _ = entries[0]
        assert normal.V[0, 0] == poly("1", 1)

    def test_symmetry_condition(self):
        for spec, _ in morris_representatives():
            assert check_prop34_symmetry(spec)

    def test_fingerprints_separate(self):
        prints = [morris_fingerprint(spec.V[0, 0]) for spec, _ in morris_representatives()]
        assert len(set(prints)) == 6


class TestCubicOrbit:
    @pytest.mark.parametrize(
        "text,orbit",
        [
            ("1", CubicOrbit.X3),
            ("m1^3", CubicOrbit.X3),
            ("m1", CubicOrbit.X2),
            ("m1^2", CubicOrbit.X2),
            ("m1 - m1^2", CubicOrbit.XXp1),
            ("m1 + m1^2", CubicOrbit.XXp1),
            ("m1^2 + 1", CubicOrbit.X2p1),
            ("m1^3 - m1", CubicOrbit.XXp1),
            ("m1^3 + m1", CubicOrbit.X2p1),
        ],
    )
    def test_classes(self, text, orbit):
        assert classify_cubic_orbit_n1(poly(text, 1)) == orbit

    def test_display(self):
        assert CubicOrbit.XXp1.display == "X(X+1)"

    def test_discriminant(self):
        assert binary_cubic_discriminant(poly("m1 - m1^2", 1)) == 1
        assert binary_cubic_discriminant(poly("m1^2 + 1", 1)) == -4

    def test_refuses(self):
        with pytest.raises(exp.ArgError):
            classify_cubic_orbit_n1(MultiPoly.zero(1))
        with pytest.raises(exp.ArgError):
            classify_cubic_orbit_n1(poly("m1^4", 1))
        with pytest.raises(exp.DimensionError):
            classify_cubic_orbit_n1(poly("m2", 2))

    def test_invariant_under_moves(self):
        rng = np.random.default_rng(0)
        values = [F(-2), F(-1), F(-1, 2), F(0), F(1, 2), F(1), F(3)]
        for spec, _ in morris_representatives():
            V = spec.V[0, 0]
            orbit = classify_cubic_orbit_n1(V)
            moved = 0
            while moved < 100:
                rows = [[values[i] for i in rng.integers(0, len(values), 2)] for _ in range(2)]
                try:
                    g = GroupElement.from_rows(rows)
                except exp.SingularError:
                    continue
                assert classify_cubic_orbit_n1(transform_variance_cubic_n1(g, V)) == orbit
                moved += 1


class TestWitnesses:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_II_to_III(self, n):
        g = witness_II_to_III(n)
        assert g == GroupElement.g_c([1] * n)
        image = transform_variance(g, casalis_representative(CasalisFamily("II", n)))
        assert image.is_polynomial
        assert image.numerators == casalis_representative(CasalisFamily("III", n)).V

    def test_binomial_to_negative_binomial(self):
        image = transform_variance(witness_II_to_III(1), casalis_representative(CasalisFamily("II", 1)))
        assert image.numerators[0, 0] == poly("m1 + m1^2", 1)

    def test_partial_ones(self):
        obstruction = partial_ones_obstruction(2, 1)
        assert obstruction.square_k == 1
        assert obstruction.square_k1 == -1
        assert obstruction.opposite
        with pytest.raises(exp.ShapeError):
            decompose_simple_quadratic(obstruction.transformed)

    def test_partial_ones_range(self):
        with pytest.raises(exp.ArgError):
            partial_ones_obstruction(2, 2)

    @pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 4) for k in range(1, n + 1)])
    def test_Ik_chain(self, n, k):
        assert check_Ik_chain(n, k)

    def test_Ik_chain_other_c1(self):
        assert check_Ik_chain(2, 1, F(-2))
        assert check_Ik_chain(3, 2, F(-1, 2))

    def test_Ik_chain_first_stage(self):
        # n = 2, k = 1: T_{g_{b,c}}(diag(m1, 1)) with s = 1 - m1
        first = run_Ik_chain(2, 1)[0]
        expected = [["1 - 2*m1 + m1^2", "-m2 + m1*m2"], ["-m2 + m1*m2", "1 - m1 + m2^2"]]
        assert first.is_polynomial
        assert first.numerators.to_text() == expected

    def test_Ik_chain_expected(self):
        chain = witness_Ik_chain(2, 1)
        assert chain.expected[1, 1] == poly("-m1 + m2^2", 2)
        assert chain.g1 == GroupElement.jorgensen(2, 1)

    def test_Ik_chain_needs_negative_c1(self):
        with pytest.raises(exp.ArgError):
            witness_Ik_chain(2, 1, 1)
        with pytest.raises(exp.ArgError):
            witness_Ik_chain(2, 3)
