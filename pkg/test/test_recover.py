import math
from fractions import Fraction
import pytest
import nefflow.common.build as build
import nefflow.common.exceptions as exp
import nefflow.common.stage as stage
import nefflow.algebra.monomials as mono
from nefflow.algebra.parser import parse_series
from nefflow.algebra.series import SeriesVector, TruncSeries, series_log1p
from nefflow.catalog.families import CasalisFamily, casalis_representative
from nefflow.recover.pipeline import (
    integrate_phi,
    phi_prime_from_variance,
    recover_measure,
    round_trip_agrees,
    solve_K,
)
from nefflow.recover.stages import RecoveryState, default_recovery_sequence, run_recovery
from nefflow.transform.action import VarianceSpec

F = Fraction


def multinomial():
    return casalis_representative(CasalisFamily("III", 2))


def variance1(text):
    return VarianceSpec.from_text([[text]])


def log_one_plus_s(D):
    return series_log1p(parse_series("z1 + z2", 2, D))


class TestPhiPrime:
    def test_multinomial(self):
        phi_prime = phi_prime_from_variance(multinomial(), 4)
        expected = parse_series("1 - (z1 + z2) + (z1 + z2)^2 - (z1 + z2)^3 + (z1 + z2)^4", 2, 4)
        assert phi_prime[0] == expected
        assert phi_prime[1] == expected

    def test_poisson(self):
        phi_prime = phi_prime_from_variance(variance1("m1"), 5)
        assert phi_prime[0] == TruncSeries.one(1, 5)

    def test_gaussian_is_not_nn_type(self):
        with pytest.raises(exp.NotNnTypeError):
            phi_prime_from_variance(variance1("1"), 4)

    def test_not_analytic(self):
        with pytest.raises(exp.NotAnalyticError):
            phi_prime_from_variance(variance1("m1^2"), 4)


class TestIntegrate:
    def test_log(self):
        phi_prime = phi_prime_from_variance(multinomial(), 5)
        phi = integrate_phi(phi_prime)
        assert phi.agrees_with(log_one_plus_s(6), 6)
        assert phi.constant_term == 0

    def test_constant(self):
        phi = integrate_phi(SeriesVector([TruncSeries.one(1, 3)]))
        assert phi.to_poly() == TruncSeries.variable(1, 0, 3).to_poly()

    def test_product(self):
        phi = integrate_phi(SeriesVector([TruncSeries.variable(2, 1, 3), TruncSeries.variable(2, 0, 3)]))
        assert phi.terms == {(1, 1): 1}

    def test_not_gradient(self):
        with pytest.raises(exp.NotGradientError):
            integrate_phi(SeriesVector([TruncSeries.variable(2, 1, 3), TruncSeries.zero(2, 3)]))


class TestSolveK:
    def test_log(self):
        K = solve_K(log_one_plus_s(6))
        for component in K:
            assert component.agrees_with(log_one_plus_s(6), 5)

    def test_poisson(self):
        K = solve_K(TruncSeries.variable(1, 0, 4))
        assert K[0].is_zero()

    def test_euler_operator(self):
        phi = integrate_phi(phi_prime_from_variance(casalis_representative(CasalisFamily("II", 2)), 5))
        K = solve_K(phi)
        for i, component in enumerate(K):
            euler = component.derivative(0).multiply_by_variable(0) + component.derivative(1).multiply_by_variable(1)
            assert euler.agrees_with(1 - phi.derivative(i), euler.D)

    def test_bad_constant(self):
        with pytest.raises(exp.NotNnTypeError):
            solve_K(parse_series("2*z1", 1, 3))


class TestRecoverMeasure:
    def test_multinomial(self):
        table = recover_measure(multinomial(), 4)
        for k in mono.up_to(2, 4):
            expected = F(math.factorial(sum(k)), math.factorial(k[0]) * math.factorial(k[1]))
            assert table[k] == expected
        assert (table[(1, 1)], table[(2, 1)], table[(2, 2)]) == (2, 3, 6)

    def test_poisson(self):
        table = recover_measure(variance1("m1"), 6)
        assert [table[(k,)] for k in range(7)] == [F(1, math.factorial(k)) for k in range(7)]

    def test_negative_binomial(self):
        table = recover_measure(variance1("m1 + m1^2"), 6)
        assert all(table[(k,)] == 1 for k in range(7))

    def test_binomial(self):
        table = recover_measure(variance1("m1 - m1^2"), 5)
        assert [table[(k,)] for k in range(6)] == [1, 1, 0, 0, 0, 0]

    def test_unit_mass_at_zero(self):
        for family in (CasalisFamily("II", 2), CasalisFamily("III", 3), CasalisFamily("I", 2, 2)):
            assert recover_measure(casalis_representative(family), 3)[(0,) * family.n] == 1

    def test_deterministic(self):
        assert recover_measure(multinomial(), 4) == recover_measure(multinomial(), 4)

    @pytest.mark.parametrize("text", ["m1", "m1 + m1^2", "m1 - m1^2"])
    def test_round_trip(self, text):
        V = variance1(text)
        assert round_trip_agrees(V, recover_measure(V, 6))

    def test_round_trip_multinomial(self):
        assert round_trip_agrees(multinomial(), recover_measure(multinomial(), 4))

    def test_round_trip_detects_mismatch(self):
        table = recover_measure(variance1("m1"), 6)
        assert not round_trip_agrees(variance1("m1 + m1^2"), table)


class TestStages:
    def test_run_recovery(self):
        config = build.RecoveryConfig(max_degree=4, check_oracle=True)
        state = run_recovery(multinomial(), config)
        assert state.measure[(2, 2)] == 6
        assert state.info.oracle_passed
        assert state.info.phi_prime_at_zero == "['1', '1']"
        assert set(state.info.stage_seconds) == {
            "phi_prime", "integrate_phi", "solve_k", "exponentiate_k", "extract_measure", "check_round_trip"
        }
        assert not state.info.warnings

    def test_oracle_off(self):
        state = run_recovery(variance1("m1"), build.RecoveryConfig(max_degree=3))
        assert state.info.oracle_passed is None

    def test_precondition_propagates(self):
        with pytest.raises(exp.NotNnTypeError):
            run_recovery(variance1("1"), build.RecoveryConfig(max_degree=3))

    def test_out_of_order(self):
        state = RecoveryState(variance1("m1"), build.RecoveryConfig(max_degree=3))
        with pytest.raises(exp.StageError):
            default_recovery_sequence().stages[2].fire(state)

    def test_save(self, tmp_path):
        state = default_recovery_sequence().launch(
            RecoveryState(variance1("m1 + m1^2"), build.RecoveryConfig(max_degree=3))
        )
        path = str(tmp_path / "state.yaml")
        state.save(path)
        saved = build.load_yaml(path)
        assert saved["max_degree"] == 3
        assert saved["variance"] == [["m1 + m1^2"]]
        assert saved["first_masses"] == {"(0,)": "1", "(1,)": "1"}
        assert "nefflow_version" in saved

    def test_unexpected_error_becomes_stage_error(self):
        class Broken(stage.Stage):
            def __init__(self):
                super().__init__("broken", "Breaking...")

            def fire(self, state):
                return 1 // 0

        state = RecoveryState(variance1("m1"), build.RecoveryConfig(max_degree=3))
        sequence = stage.Sequence("broken_run", "Breaking:", [Broken()])
        with pytest.raises(exp.StageError, match="ZeroDivisionError"):
            sequence.launch(state)
        assert "broken" not in state.info.stage_seconds
