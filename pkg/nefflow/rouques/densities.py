"""
Densities and masses of the families mu_{lambda,c}:

    p(lambda, c, x) = lambda / (lambda + <c,x>) f(lambda + <c,x>, x) 1{lambda + <c,x> > 0}

on R for the continuous semigroups and on N^n for the discrete ones.
"""
import math
from typing import Dict, List, Sequence, Tuple
import numpy as np
from scipy.special import gammaln
import nefflow.common.exceptions as exp
import nefflow.algebra.monomials as mono
from nefflow.algebra.monomials import ExponentVector
from nefflow.rouques.semigroups import Semigroup, SemigroupTag, TiltedDensity


def tilted_density(semigroup: Semigroup, lam: float, c: Sequence[float], x: float) -> float:
    """
    p(lambda, c, x) for any real lambda; the indicator only looks at
    lambda + <c,x>. lambda = 0 gives 0 away from the atom.
    """
    shifted = lam + float(np.dot(c, [x]))
    if shifted <= 0:
        return 0.0
    return lam / shifted * semigroup.density(shifted, x)


def tilted_mass(semigroup: Semigroup, lam: float, c: Sequence[float], k: Sequence[int]) -> float:
    """p_k(lambda, c), with p_k(0, c) the unit mass at k = 0"""
    if lam == 0:
        return 1.0 if not any(k) else 0.0
    shifted = lam + float(np.dot(c, k))
    if shifted <= 0:
        return 0.0
    return lam / shifted * semigroup.mass(shifted, k)


def continuous_density(t: TiltedDensity, x: float) -> float:
    if t.semigroup.is_discrete:
        raise exp.ArgError(
            f"continuous_density needs GaussianN or Gamma, got {t.semigroup.tag.value}"
        )
    lam, c = t.h.as_floats()
    return tilted_density(t.semigroup, lam, c, float(x))


def discrete_mass(t: TiltedDensity, k: Sequence[int]) -> float:
    if not t.semigroup.is_discrete:
        raise exp.ArgError(
            f"discrete_mass needs Poisson or NegBinomialRn, got {t.semigroup.tag.value}"
        )
    k = mono.validate(k, t.semigroup.n)
    lam, c = t.h.as_floats()
    return tilted_mass(t.semigroup, lam, c, k)


def negbin_convolution_powers(p: Sequence[float], max_total: int) -> List[Dict[ExponentVector, float]]:
    """
    nu^{*i} for i = 0..max_total with nu = sum_j p_j delta_(e_j); entry i
    maps every k with |k| = i to nu^{*i}({k})
    """
    n = len(p)
    powers = [{mono.zero(n): 1.0}]
    for i in range(1, max_total + 1):
        previous = powers[-1]
        current = {}
        for k in mono.of_degree(n, i):
            total = 0.0
            for j in range(n):
                if k[j]:
                    total += p[j] * previous[k[:j] + (k[j] - 1,) + k[j + 1 :]]
            current[k] = total
        powers.append(current)
    return powers


def mass_table(t: TiltedDensity, kmax: int) -> Dict[ExponentVector, float]:
    """
    p_k(lambda, c) for every |k| <= kmax. NegBinomialRn masses come from
    the convolution powers of nu weighted by (lambda')_i / i!.
    """
    if not t.semigroup.is_discrete:
        raise exp.ArgError("mass_table needs a discrete semigroup")
    n = t.semigroup.n
    lam, c = t.h.as_floats()
    if t.semigroup.tag == SemigroupTag.POISSON:
        return {k: tilted_mass(t.semigroup, lam, c, k) for k in mono.up_to(n, kmax)}

    p = t.semigroup.p
    powers = negbin_convolution_powers(p, kmax)
    log_norm = math.log1p(-sum(p))
    table = {}
    for i, power in enumerate(powers):
        for k, weight in power.items():
            shifted = lam + float(np.dot(c, k))
            if shifted <= 0:
                table[k] = 0.0
                continue
            log_pochhammer = gammaln(shifted + i) - gammaln(shifted) - gammaln(i + 1)
            table[k] = lam / shifted * math.exp(log_pochhammer + shifted * log_norm) * weight
    return table


def poisson_mass_array(t: TiltedDensity, kmax: int) -> np.ndarray:
    """Masses p_0..p_kmax of a one-dimensional table as an array"""
    if t.semigroup.tag != SemigroupTag.POISSON:
        raise exp.ArgError("poisson_mass_array needs the Poisson semigroup")
    table = mass_table(t, kmax)
    return np.array([table[(k,)] for k in range(kmax + 1)])


def sample_from_table(masses: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling from a truncated table, renormalised to sum 1"""
    cdf = np.cumsum(masses)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, rng.random(size), side="right")


def table_rows(table: Dict[ExponentVector, float]) -> List[Tuple[ExponentVector, float]]:
    return sorted(table.items(), key=lambda kv: mono.grlex_key(kv[0]))
