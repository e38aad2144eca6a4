"""
Numeric checks of the tilted families: the convolution identities, the
cumulant functional equation, normalisation, moments by Monte Carlo and
the closed-form variance functions.
"""
import math
from typing import NamedTuple, Sequence, Union
import numpy as np
from scipy import integrate
import nefflow.common.exceptions as exp
import nefflow.algebra.monomials as mono
from nefflow.algebra.poly import MultiPoly, PolyMatrix
from nefflow.algebra.rational import as_fraction
from nefflow.rouques.densities import (
    mass_table,
    poisson_mass_array,
    sample_from_table,
    tilted_density,
    tilted_mass,
)
from nefflow.rouques.semigroups import HElement, Semigroup, SemigroupTag, TiltedDensity
from nefflow.transform.action import transform_variance

# Fraction of the truncated sum allowed in the last tenth of the shells
TAIL_TOLERANCE = 1e-10


def convolution_identity_check(t: TiltedDensity, k: Sequence[int]) -> float:
    """
    |p_k(lambda,c) - sum_{k' <= k} p_k'(lambda,0) p_{k-k'}(<c,k'>, c)| for
    <c,k> >= 0; the sum is finite because k - k' must stay in N^n
    """
    semigroup = t.semigroup
    if not semigroup.is_discrete:
        raise exp.ArgError("convolution_identity_check needs a discrete semigroup")
    k = mono.validate(k, semigroup.n)
    lam, c = t.h.as_floats()
    if float(np.dot(c, k)) < 0:
        raise exp.ArgError(f"The identity is stated for <c,k> >= 0, got <c,k> = {np.dot(c, k)}")
    lhs = tilted_mass(semigroup, lam, c, k)
    rhs = 0.0
    zero_c = np.zeros_like(c)
    for kp in mono.in_box(k):
        rest = mono.sub(k, kp)
        rhs += tilted_mass(semigroup, lam, zero_c, kp) * tilted_mass(
            semigroup, float(np.dot(c, kp)), c, rest
        )
    return abs(lhs - rhs)


def continuous_convolution_check(t: TiltedDensity, x: float) -> float:
    """
    |p(lambda,c,x) - integral p(lambda,0,y) p(c y, c, x - y) dy| for c x > 0,
    by adaptive quadrature
    """
    semigroup = t.semigroup
    if semigroup.tag != SemigroupTag.GAUSSIAN:
        raise exp.ArgError("continuous_convolution_check is implemented for GaussianN")
    lam, c = t.h.as_floats()
    cx = float(c[0] * x)
    if cx <= 0:
        raise exp.ArgError(f"The continuous identity is stated for <c,x> > 0, got {cx}")

    def integrand(y: float) -> float:
        # p(cy, c, x - y) with the prefactor cy / cx, signed
        return semigroup.density(lam, y) * (c[0] * y / cx) * semigroup.density(cx, x - y)

    value, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-12, epsrel=1e-10)
    return abs(tilted_density(semigroup, lam, c, x) - value)


def _truncated_cumulant(semigroup: Semigroup, lam: float, c: np.ndarray, theta: np.ndarray, kmax: int) -> float:
    n = semigroup.n
    terms = []
    shells = []
    for k in mono.up_to(n, kmax):
        mass = tilted_mass(semigroup, lam, c, k)
        terms.append(mass * math.exp(float(np.dot(theta, k))))
        shells.append(sum(k))
    terms = np.asarray(terms)
    shells = np.asarray(shells)
    total = terms.sum()
    tail = terms[shells > kmax - max(kmax // 10, 1)].sum()
    if not np.isfinite(total) or total <= 0 or tail > TAIL_TOLERANCE * total:
        msg = f"""
        The truncated Laplace transform at theta={list(theta)} has not converged
        with kmax={kmax} (tail share {tail / total if total else float('inf'):.3g}).
        Pick theta further from the boundary of the domain or raise kmax.
        """
        raise exp.ConvergenceError(msg)
    return float(math.log(total))


class CumulantResidual(NamedTuple):
    z: float
    residual: float


def cumulant_equation_check(t: TiltedDensity, theta: Sequence[float], kmax: int) -> CumulantResidual:
    """
    With z(theta) = k_{mu_{1,c}}(theta) from the truncated sum, returns
    |k_{mu_{lambda,c}}(theta) - k_{mu_lambda}(theta + c z(theta))|
    """
    semigroup = t.semigroup
    if not semigroup.is_discrete:
        raise exp.ArgError("cumulant_equation_check needs a discrete semigroup")
    lam, c = t.h.as_floats()
    theta = np.asarray(theta, dtype=float)
    z = _truncated_cumulant(semigroup, 1.0, c, theta, kmax)
    lhs = _truncated_cumulant(semigroup, lam, c, theta, kmax)
    rhs = semigroup.cumulant(lam, theta + c * z)
    return CumulantResidual(z, abs(lhs - rhs))


def poisson_fixed_point_residual(c: float, theta: float, kmax: int) -> float:
    """|z - (e^(theta + c z) - 1)| for z = k_{mu_{1,c}}(theta), Poisson case"""
    t = TiltedDensity(Semigroup(SemigroupTag.POISSON), HElement(1.0, (c,)))
    z, _ = cumulant_equation_check(t, [theta], kmax)
    return abs(z - math.expm1(theta + c * z))


def jorgensen_consistency_check(t: TiltedDensity, theta: Sequence[float], kmax: int) -> float:
    """|k_{mu_{lambda,c}}(theta) - lambda k_{mu_{1,c}}(theta)|"""
    lam, c = t.h.as_floats()
    theta = np.asarray(theta, dtype=float)
    lhs = _truncated_cumulant(t.semigroup, lam, c, theta, kmax)
    rhs = lam * _truncated_cumulant(t.semigroup, 1.0, c, theta, kmax)
    return abs(lhs - rhs)


def normalization_check(t: TiltedDensity, kmax: int) -> float:
    """Total mass of the table truncated at |k| <= kmax"""
    return float(sum(mass_table(t, kmax).values()))


def poisson_truncation_bound(c: float, tolerance: float = TAIL_TOLERANCE) -> int:
    """
    Smallest K with (c e^(1-c))^K <= tolerance. p_k(1, c) decays at that
    geometric rate, so the table truncated at K misses about tolerance
    of the mass. 0 for c <= 0.
    """
    if c <= 0:
        return 0
    rate = math.log(c) + 1 - c
    if rate >= 0:
        msg = f"""
        The generalized Poisson masses with c={c} do not decay geometrically,
        so no truncation bound exists. Use 0 <= c < 1.
        """
        raise exp.ConvergenceError(msg)
    return math.ceil(math.log(tolerance) / rate)


class MonteCarloResult(NamedTuple):
    mean: float
    variance: float
    predicted_variance: float
    standard_error: float

    @property
    def z_score(self) -> float:
        return abs(self.variance - self.predicted_variance) / self.standard_error


def monte_carlo_moment_check(
    lam: float, c: float, kmax: int, samples: int, rng: np.random.Generator
) -> MonteCarloResult:
    """
    Sample the generalized Poisson table and compare the empirical variance
    with m (1 + c m / lambda)^2 at the empirical mean m
    """
    t = TiltedDensity(Semigroup(SemigroupTag.POISSON), HElement(lam, (c,)))
    draws = sample_from_table(poisson_mass_array(t, kmax), samples, rng).astype(float)
    mean = draws.mean()
    centered = draws - mean
    variance = float(np.mean(centered**2))
    fourth = float(np.mean(centered**4))

    predicted = mean * (1 + c * mean / lam) ** 2
    slope = (1 + c * mean / lam) * (1 + 3 * c * mean / lam)
    se_variance = math.sqrt(max(fourth - variance**2, 0.0) / samples)
    se_mean = math.sqrt(variance / samples)
    standard_error = math.hypot(se_variance, slope * se_mean)
    return MonteCarloResult(float(mean), variance, float(predicted), standard_error)


def gaussian_closed_form(lam: float, c: float, x: float) -> float:
    """lambda / (sqrt(2 pi) (lambda + c x)^(3/2)) exp(-x^2 / (2 (lambda + c x)))"""
    shifted = lam + c * x
    if shifted <= 0:
        return 0.0
    return lam / (math.sqrt(2 * math.pi) * shifted**1.5) * math.exp(-x * x / (2 * shifted))


def gaussian_closed_form_check(rng: np.random.Generator, cases: int) -> float:
    """Largest relative error between the closed form and the tilted density"""
    semigroup = Semigroup(SemigroupTag.GAUSSIAN)
    worst = 0.0
    done = 0
    while done < cases:
        lam = rng.uniform(0.1, 5.0)
        c = rng.uniform(-2.0, 2.0)
        x = rng.uniform(-4.0, 4.0)
        if lam + c * x <= 0.05:
            continue
        expected = gaussian_closed_form(lam, c, x)
        actual = tilted_density(semigroup, lam, [c], x)
        worst = max(worst, abs(actual - expected) / expected)
        done += 1
    return worst


def transformed_variance_named(semigroup: Union[Semigroup, SemigroupTag], h: HElement) -> MultiPoly:
    """
    Closed-form variance of the family obtained from Gamma or Poisson by
    g_c J_lambda, asserted against the symbolic action
    """
    tag = semigroup.tag if isinstance(semigroup, Semigroup) else semigroup
    lam = as_fraction(h.lam)
    if len(h.c) != 1:
        raise exp.DimensionError("Closed forms are available on the real line only")
    c = as_fraction(h.c[0])
    m = MultiPoly.variable(1, 0)
    if tag == SemigroupTag.GAMMA:
        base = (m * m).scale(1 / lam)
        closed = (m * m * MultiPoly.linear_form([c], lam)).scale(1 / lam**3)
    elif tag == SemigroupTag.POISSON:
        base = m
        factor = MultiPoly.linear_form([c / lam], 1)
        closed = m * factor * factor
    else:
        raise exp.ArgError(f"No closed-form transformed variance for {tag.value}")

    symbolic = transform_variance(HElement(lam, (c,)).group_element(), PolyMatrix([[base]], 1))
    lowered = symbolic.try_lower()
    if lowered is None or lowered[0, 0] != closed:
        msg = f"""
        The symbolic action gives {symbolic.numerators.to_text()} / {symbolic.denominator.to_text()},
        which differs from the closed form {closed.to_text()}.
        """
        raise exp.Error(msg)
    return closed
