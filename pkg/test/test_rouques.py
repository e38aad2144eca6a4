import math
from fractions import Fraction
import numpy as np
import pytest
import nefflow.common.exceptions as exp
from nefflow.algebra.parser import parse_polynomial
from nefflow.rouques.checks import (
    continuous_convolution_check,
    convolution_identity_check,
    cumulant_equation_check,
    gaussian_closed_form,
    gaussian_closed_form_check,
    jorgensen_consistency_check,
    monte_carlo_moment_check,
    normalization_check,
    poisson_fixed_point_residual,
    poisson_truncation_bound,
    transformed_variance_named,
)
from nefflow.rouques.densities import (
    continuous_density,
    discrete_mass,
    mass_table,
    poisson_mass_array,
    sample_from_table,
)
from nefflow.rouques.semigroups import HElement, Semigroup, SemigroupTag, TiltedDensity

GAUSSIAN = Semigroup(SemigroupTag.GAUSSIAN)
GAMMA = Semigroup(SemigroupTag.GAMMA)
POISSON = Semigroup(SemigroupTag.POISSON)


def tilted(semigroup, lam, *c):
    return TiltedDensity(semigroup, HElement(lam, c))


def negbin(lam, c, p=(0.2, 0.3)):
    return TiltedDensity(Semigroup(SemigroupTag.NEGBINOMIAL, 2, p), HElement(lam, c))


class TestSemigroups:
    def test_from_text(self):
        assert SemigroupTag.from_text("poisson") == SemigroupTag.POISSON
        assert SemigroupTag.from_text("NegBinomialRn") == SemigroupTag.NEGBINOMIAL
        with pytest.raises(exp.ArgError):
            SemigroupTag.from_text("cauchy")

    def test_validation(self):
        with pytest.raises(exp.ArgError):
            Semigroup(SemigroupTag.NEGBINOMIAL, 2, (0.5, 0.6))
        with pytest.raises(exp.DimensionError):
            Semigroup(SemigroupTag.NEGBINOMIAL, 2, (0.5,))
        with pytest.raises(exp.DimensionError):
            Semigroup(SemigroupTag.POISSON, 2)
        with pytest.raises(exp.ArgError):
            HElement(0, (1,))
        with pytest.raises(exp.DimensionError):
            TiltedDensity(POISSON, HElement(1, (1, 1)))

    def test_cumulants(self):
        assert POISSON.cumulant(2.0, [0.0]) == 0.0
        assert GAUSSIAN.cumulant(2.0, [1.0]) == pytest.approx(1.0)
        with pytest.raises(exp.ConvergenceError):
            GAMMA.cumulant(1.0, [0.5])

    def test_group_element(self):
        g = HElement(2, (1,)).group_element()
        assert g.c == [1] and g.d == 2


class TestDensities:
    def test_gaussian_untilted(self):
        assert continuous_density(tilted(GAUSSIAN, 1, 0), 0) == pytest.approx(1 / math.sqrt(2 * math.pi))

    def test_gaussian_tilted(self):
        value = continuous_density(tilted(GAUSSIAN, 1, 1), 1)
        assert value == pytest.approx(0.1098478, rel=1e-6)
        assert value == pytest.approx(gaussian_closed_form(1, 1, 1), rel=1e-12)

    def test_gamma_indicator(self):
        assert continuous_density(tilted(GAMMA, 1, -1), 2) == 0.0
        assert continuous_density(tilted(GAMMA, 2, 0), 0.5) == pytest.approx(0.5)

    def test_poisson_untilted(self):
        t = tilted(POISSON, 1.5, 0)
        for k in range(6):
            assert discrete_mass(t, [k]) == pytest.approx(math.exp(-1.5) * 1.5**k / math.factorial(k))

    def test_generalized_poisson(self):
        assert discrete_mass(tilted(POISSON, 1, 1), [2]) == pytest.approx(1.5 * math.exp(-3), rel=1e-12)

    def test_wrong_kind(self):
        with pytest.raises(exp.ArgError):
            discrete_mass(tilted(GAUSSIAN, 1, 0), [1])
        with pytest.raises(exp.ArgError):
            continuous_density(tilted(POISSON, 1, 0), 1.0)

    def test_negbin_table_matches_direct_masses(self):
        t = negbin(1.5, (0.1, 0.2))
        table = mass_table(t, 8)
        for k, value in table.items():
            assert value == pytest.approx(discrete_mass(t, k), rel=1e-10)

    def test_negbin_untilted_generating_function(self):
        # sum_k f(lambda, k) z^k = ((1 - sum p) / (1 - <p, z>))^lambda, here at z = (1/2, 1/2)
        table = mass_table(negbin(2.0, (0.0, 0.0)), 60)
        total = sum(v * 0.5 ** sum(k) for k, v in table.items())
        assert total == pytest.approx((0.5 / 0.75) ** 2, rel=1e-10)

    def test_sampling_is_reproducible(self):
        masses = poisson_mass_array(tilted(POISSON, 1, 0.3), 50)
        first = sample_from_table(masses, 100, np.random.default_rng(1))
        second = sample_from_table(masses, 100, np.random.default_rng(1))
        assert (first == second).all()
        assert first.min() >= 0 and first.max() <= 50


class TestConvolution:
    def test_poisson(self):
        assert convolution_identity_check(tilted(POISSON, 1, 0.5), [3]) < 1e-12

    def test_untilted(self):
        assert convolution_identity_check(tilted(POISSON, 2, 0), [4]) < 1e-12

    def test_negbin(self):
        assert convolution_identity_check(negbin(1.5, (0.2, 0.1)), [2, 3]) < 1e-12

    def test_negative_direction(self):
        with pytest.raises(exp.ArgError):
            convolution_identity_check(tilted(POISSON, 1, -0.5), [3])

    def test_continuous_gaussian(self):
        assert continuous_convolution_check(tilted(GAUSSIAN, 1, 0.5), 1.0) < 1e-6
        assert continuous_convolution_check(tilted(GAUSSIAN, 2, -1), -0.5) < 1e-6


class TestCumulant:
    def test_poisson_fixed_point(self):
        assert poisson_fixed_point_residual(0.3, -2.0, 200) < 1e-8

    def test_untilted(self):
        _, residual = cumulant_equation_check(tilted(POISSON, 1.7, 0), [-1.0], 200)
        assert residual < 1e-10

    def test_poisson(self):
        _, residual = cumulant_equation_check(tilted(POISSON, 2.5, 0.3), [-1.0], 200)
        assert residual < 1e-8

    def test_negbin(self):
        _, residual = cumulant_equation_check(negbin(2.0, (0.1, 0.1)), [-1.0, -1.0], 60)
        assert residual < 1e-6

    def test_jorgensen(self):
        assert jorgensen_consistency_check(tilted(POISSON, 2.5, 0.3), [-1.0], 200) < 1e-8

    def test_divergence_detected(self):
        with pytest.raises(exp.ConvergenceError):
            cumulant_equation_check(tilted(POISSON, 1, 0.5), [0.5], 30)


class TestNormalization:
    @pytest.mark.parametrize("c", [0.0, 0.2, 0.5, 0.9])
    def test_poisson(self, c):
        kmax = max(200, poisson_truncation_bound(c))
        total = normalization_check(tilted(POISSON, 1, c), kmax)
        assert 1 - 1e-8 <= total <= 1 + 1e-10

    def test_negbin(self):
        total = normalization_check(negbin(1.0, (0.1, 0.1)), 120)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_truncation_bound(self):
        assert poisson_truncation_bound(0) == 0
        assert poisson_truncation_bound(0.5) == 120
        assert poisson_truncation_bound(0.9) > 4000
        with pytest.raises(exp.ConvergenceError):
            poisson_truncation_bound(1.0)


class TestMoments:
    def test_monte_carlo(self):
        result = monte_carlo_moment_check(1.0, 0.3, 200, 20000, np.random.default_rng(0))
        assert result.z_score < 5
        assert result.mean == pytest.approx(1 / 0.7, rel=0.05)

    def test_gaussian_closed_form(self):
        assert gaussian_closed_form_check(np.random.default_rng(2), 100) < 1e-12
        assert gaussian_closed_form(1, -1, 2) == 0.0


class TestNamedVariance:
    def test_gamma(self):
        assert transformed_variance_named(GAMMA, HElement(1, (1,))) == parse_polynomial("m1^2*(1 + m1)", 1)

    def test_poisson_untilted(self):
        assert transformed_variance_named(SemigroupTag.POISSON, HElement(1, (0,))) == parse_polynomial("m1", 1)

    def test_poisson(self):
        expected = parse_polynomial("m1*(1 + 1/2*m1)^2", 1)
        assert transformed_variance_named(POISSON, HElement(2, (1,))) == expected

    def test_gamma_scaled(self):
        expected = parse_polynomial("m1^2*(3 + 1/2*m1)", 1).scale(Fraction(1, 27))
        assert transformed_variance_named(GAMMA, HElement(3, (Fraction(1, 2),))) == expected

    def test_unsupported(self):
        with pytest.raises(exp.ArgError):
            transformed_variance_named(GAUSSIAN, HElement(1, (1,)))
