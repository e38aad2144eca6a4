from fractions import Fraction
import numpy as np
import pytest
import nefflow.common.build as build
import nefflow.common.exceptions as exp
import nefflow.algebra.linsolve as linsolve
import nefflow.algebra.monomials as mono
from nefflow.algebra.parser import parse_polynomial, parse_series, parse_series_list
from nefflow.algebra.poly import MultiPoly, PolyMatrix, poly_eval, poly_parse
from nefflow.algebra.rational import as_fraction, format_rational, parse_rational
from nefflow.algebra.series import (
    SeriesVector,
    TruncSeries,
    exact_quotient,
    identity_vector,
    series_compose,
    series_det,
    series_exp,
    series_log1p,
    series_matmul,
    series_reciprocal,
    series_reversion,
    series_solve_vanishing_div,
)

F = Fraction


def z(n, i, D):
    return TruncSeries.variable(n, i, D)


class TestRational:
    def test_parse_and_format(self):
        assert parse_rational("3/6") == F(1, 2)
        assert parse_rational(" -4 ") == -4
        assert format_rational(F(-3, 2)) == "-3/2"
        assert format_rational(F(4)) == "4"

    @pytest.mark.parametrize("text", ["0.5", "1e3", "1/0", "abc"])
    def test_parse_rejects(self, text):
        with pytest.raises(exp.ParseError):
            parse_rational(text)

    def test_as_fraction_refuses_floats(self):
        with pytest.raises(exp.ArgError):
            as_fraction(0.5)
        with pytest.raises(exp.ArgError):
            as_fraction(True)


class TestMonomials:
    def test_grlex_order(self):
        assert list(mono.of_degree(2, 2)) == [(2, 0), (1, 1), (0, 2)]
        assert list(mono.up_to(2, 1)) == [(0, 0), (1, 0), (0, 1)]

    def test_box(self):
        assert sorted(mono.in_box((1, 2))) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]

    def test_validate(self):
        with pytest.raises(ValueError):
            mono.validate((1, -1), 2)
        with pytest.raises(ValueError):
            mono.validate((1,), 2)


class TestParser:
    def test_canonical_terms(self):
        assert parse_polynomial("m1 - m1^2", 1).terms == {(1,): 1, (2,): -1}
        assert parse_polynomial("3/2*m1^2*m2", 2).terms == {(2, 1): F(3, 2)}

    def test_parentheses_expand(self):
        assert parse_polynomial("m1*(m1+1)", 1) == parse_polynomial("m1^2 + m1", 1)

    def test_cancellation_gives_zero(self):
        assert parse_polynomial("m1 - m1", 1).is_zero()

    def test_variable_out_of_range(self):
        with pytest.raises(exp.ParseError):
            parse_polynomial("m3", 2)

    @pytest.mark.parametrize("text", ["m1 +", "(m1", "m1 ^ m2", "2 ** m1", ""])
    def test_malformed(self, text):
        with pytest.raises(exp.ParseError):
            parse_polynomial(text, 2)

    def test_exponent_cap(self):
        text = f"(m1+m2+m3)^{build.MAX_EXPRESSION_DEGREE + 1}"
        with pytest.raises(exp.ParseError) as info:
            parse_polynomial(text, 3)
        assert info.value.position == text.index("^") + 1
        assert parse_polynomial("m1^3", 1).terms == {(3,): 1}

    def test_nested_powers_capped(self):
        text = "((m1 + 1)^8)^9"
        with pytest.raises(exp.ParseError) as info:
            parse_polynomial(text, 1)
        assert info.value.position == text.rindex("^") + 1
        assert parse_polynomial("((m1 + 1)^2)^2", 1) == parse_polynomial("(m1 + 1)^4", 1)

    def test_functions_only_in_series(self):
        with pytest.raises(exp.ParseError):
            parse_polynomial("exp(m1)", 1)
        s = parse_series("exp(z1)", 1, 3)
        assert s.coefficient((3,)) == F(1, 6)

    def test_series_function_needs_zero_constant(self):
        with pytest.raises(exp.ParseError):
            parse_series("exp(1 + z1)", 1, 3)

    def test_series_list(self):
        parts = parse_series_list("1 + z2; 1 + z1", 2, 3)
        assert len(parts) == 2
        assert parts[0].coefficient((0, 1)) == 1
        with pytest.raises(exp.ParseError):
            parse_series_list("1;;z1", 1, 2)


class TestPoly:
    def test_eval(self):
        assert poly_eval(parse_polynomial("m1 - m1^2", 1), [F(1, 2)]) == F(1, 4)
        assert poly_eval(parse_polynomial("m1*m2", 2), [2, 3]) == 6

    def test_poly_parse(self):
        assert poly_parse("m1*(m1+1)", 1) == parse_polynomial("m1^2 + m1", 1)
        with pytest.raises(exp.ParseError):
            poly_parse("m3", 2)

    def test_eval_is_multiplicative(self):
        rng = np.random.default_rng(7)
        values = [F(-2), F(-1), F(-1, 3), F(0), F(1, 2), F(1), F(3)]
        for trial in range(30):
            n = 1 + trial % 3
            monomials = list(mono.up_to(n, 2))
            p, q = (
                MultiPoly(n, {k: values[int(rng.integers(0, len(values)))] for k in monomials})
                for _ in range(2)
            )
            x = [values[int(i)] for i in rng.integers(0, len(values), n)]
            assert poly_eval(p * q, x) == poly_eval(p, x) * poly_eval(q, x)

    def test_degree_of_zero(self):
        assert MultiPoly.zero(2).degree == -1
        assert MultiPoly.one(2).degree == 0

    def test_arithmetic(self):
        m1 = MultiPoly.variable(2, 0)
        m2 = MultiPoly.variable(2, 1)
        assert (m1 + m2) ** 2 == m1 * m1 + m1 * m2 * 2 + m2 * m2
        assert (m1 - m1).is_zero()
        assert (1 - m1) + m1 == 1

    def test_mixed_dimensions(self):
        with pytest.raises(exp.DimensionError):
            MultiPoly.variable(1, 0) + MultiPoly.variable(2, 0)

    def test_substitute(self):
        p = parse_polynomial("m1^2 + m2", 2)
        w = MultiPoly.variable(1, 0)
        assert p.substitute([w + 1, w]) == parse_polynomial("m1^2 + 3*m1 + 1", 1)

    def test_to_text(self):
        assert parse_polynomial("2 - m1 + 3/2*m1*m2", 2).to_text() == "2 - m1 + 3/2*m1*m2"

    def test_matrix_determinant_and_adjugate(self):
        m = PolyMatrix([[parse_polynomial("m1", 2), parse_polynomial("m2", 2)],
                        [parse_polynomial("m2", 2), parse_polynomial("1", 2)]])
        assert m.is_symmetric()
        assert m.determinant() == parse_polynomial("m1 - m2^2", 2)
        product = m * m.adjugate()
        det = m.determinant()
        assert product == PolyMatrix.diagonal([det, det])


class TestLinsolve:
    def test_inverse(self):
        a = [[F(2), F(1)], [F(1), F(1)]]
        assert linsolve.matmul(a, linsolve.inverse(a)) == linsolve.identity(2)

    def test_singular(self):
        with pytest.raises(exp.SingularError):
            linsolve.inverse([[F(1), F(2)], [F(2), F(4)]])
        assert linsolve.determinant([[F(1), F(2)], [F(2), F(4)]]) == 0
        assert linsolve.rank([[F(1), F(2)], [F(2), F(4)]]) == 1

    def test_solve_consistent(self):
        sol = linsolve.solve_consistent([[F(1), F(1)], [F(2), F(2)]], [F(3), F(6)])
        assert sol is not None and sol[0] + sol[1] == 3
        assert linsolve.solve_consistent([[F(1), F(1)], [F(2), F(2)]], [F(3), F(5)]) is None

    def test_adjugate(self):
        a = [[F(1), F(2), F(0)], [F(0), F(1), F(3)], [F(4), F(0), F(1)]]
        det = linsolve.determinant(a)
        expected = [[det if i == j else 0 for j in range(3)] for i in range(3)]
        assert linsolve.matmul(a, linsolve.adjugate(a)) == expected

    def test_inputs_untouched(self):
        a = [[F(0), F(2), F(1)], [F(1), F(1), F(0)], [F(2), F(2), F(0)]]
        t = [F(1), F(2), F(4)]
        before = ([row[:] for row in a], t[:])
        linsolve.inverse(a)
        linsolve.determinant(a)
        linsolve.rank(a)
        linsolve.adjugate(a)
        linsolve.solve_consistent(a, t)
        assert (a, t) == before

    def test_row_echelon_in_place(self):
        a = [[F(0), F(1)], [F(2), F(4)]]
        t = [F(3), F(5)]
        assert linsolve.row_echelon(a, t) == []
        assert a == [[F(2), F(4)], [F(0), F(1)]]
        assert t == [F(5), F(3)]


class TestSeries:
    def test_exp(self):
        e = series_exp(z(1, 0, 3))
        assert [e.coefficient((k,)) for k in range(4)] == [1, 1, F(1, 2), F(1, 6)]

    def test_log1p(self):
        s = series_log1p(z(1, 0, 4))
        assert [s.coefficient((k,)) for k in range(5)] == [0, 1, F(-1, 2), F(1, 3), F(-1, 4)]

    def test_log1p_of_sum(self):
        s = series_log1p(z(2, 0, 2) + z(2, 1, 2))
        assert s.coefficient((1, 1)) == -1
        assert s.coefficient((2, 0)) == F(-1, 2)

    def test_exp_log_inverse(self):
        s = z(2, 0, 5) + z(2, 1, 5).scale(F(1, 3)) + (z(2, 0, 5) * z(2, 1, 5))
        assert series_log1p(series_exp(s) - 1) == s

    def test_exp_needs_zero_constant(self):
        with pytest.raises(exp.ArgError):
            series_exp(TruncSeries.one(1, 3))

    def test_reciprocal(self):
        s = TruncSeries.one(2, 4) + z(2, 0, 4) + z(2, 1, 4)
        assert s * series_reciprocal(s) == TruncSeries.one(2, 4)
        with pytest.raises(exp.ArgError):
            series_reciprocal(z(1, 0, 2))

    def test_compose(self):
        outer = z(1, 0, 3) * z(1, 0, 3)
        inner = SeriesVector([z(2, 0, 3) + z(2, 1, 3)])
        result = series_compose(outer, inner)
        assert result.terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}

    def test_compose_needs_vanishing_inner(self):
        with pytest.raises(exp.ArgError):
            series_compose(z(1, 0, 2), SeriesVector([TruncSeries.one(1, 2)]))

    def test_det(self):
        one = TruncSeries.one(2, 3)
        zero = TruncSeries.zero(2, 3)
        d = series_det([[one + z(2, 0, 3), zero], [zero, one + z(2, 1, 3)]])
        assert d.terms == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}

    def test_det_is_multiplicative(self):
        rng = np.random.default_rng(3)
        values = [F(-1), F(0), F(1, 2), F(1), F(2)]
        monomials = list(mono.up_to(2, 2))

        def random_matrix():
            return [
                [
                    TruncSeries(2, 3, {k: values[int(rng.integers(0, len(values)))] for k in monomials})
                    for _ in range(2)
                ]
                for _ in range(2)
            ]

        for _ in range(10):
            a, b = random_matrix(), random_matrix()
            assert series_det(series_matmul(a, b)) == series_det(a) * series_det(b)

    def test_reversion(self):
        F1 = z(1, 0, 5) + z(1, 0, 5) * z(1, 0, 5)
        H = series_reversion(SeriesVector([F1]))
        assert series_compose(F1, H) == z(1, 0, 5)
        # Catalan numbers with alternating signs
        assert [H[0].coefficient((k,)) for k in range(1, 5)] == [1, -1, 2, -5]

    def test_reversion_of_identity(self):
        ident = identity_vector(2, 3)
        assert series_reversion(ident) == ident


class TestVanishingDivision:
    def test_simple(self):
        m1 = parse_polynomial("m1", 1)
        x = series_solve_vanishing_div(m1, parse_polynomial("m1 + m1^2", 1), 4)
        assert x.to_poly() == parse_polynomial("1 + m1", 1)

    def test_not_analytic(self):
        with pytest.raises(exp.NotAnalyticError):
            series_solve_vanishing_div(parse_polynomial("m1", 2), parse_polynomial("m2", 2), 3)

    def test_series_quotient(self):
        q = parse_polynomial("m1*m2*(1 + m1 + m2)", 2)
        x = series_solve_vanishing_div(q, parse_polynomial("m1*m2", 2), 4)
        expected = series_reciprocal(TruncSeries.from_poly(parse_polynomial("1 + m1 + m2", 2), 4))
        assert x == expected

    def test_quotient_times_divisor(self):
        q = parse_polynomial("m1 + m2 + m1*m2", 2)
        P = parse_polynomial("(m1 + m2 + m1*m2)*(2 - m1^2)", 2)
        assert series_solve_vanishing_div(q, P, 5).to_poly() == parse_polynomial("2 - m1^2", 2)

    def test_exact_quotient(self):
        P = parse_polynomial("m1^2 - m2^2", 2)
        assert exact_quotient(P, parse_polynomial("m1 - m2", 2)) == parse_polynomial("m1 + m2", 2)
        with pytest.raises(exp.NotAnalyticError):
            exact_quotient(P, parse_polynomial("m1 + 1", 2))
