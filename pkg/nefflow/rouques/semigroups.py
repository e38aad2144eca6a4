"""
Convolution semigroups (mu_lambda) used to build the H-transformed
families, with their densities f(lambda, x) and cumulant functions.
"""
import dataclasses
import enum
import math
from typing import Sequence, Tuple, Union
import numpy as np
from scipy.special import gammaln
import nefflow.common.exceptions as exp
from nefflow.algebra.rational import RationalLike
from nefflow.group.element import GroupElement

Number = Union[float, RationalLike]


class SemigroupTag(enum.Enum):
    GAUSSIAN = "GaussianN"
    GAMMA = "Gamma"
    POISSON = "Poisson"
    NEGBINOMIAL = "NegBinomialRn"

    @classmethod
    def from_text(cls, text: str) -> "SemigroupTag":
        lookup = {tag.value.lower(): tag for tag in cls}
        lookup.update({tag.name.lower(): tag for tag in cls})
        try:
            return lookup[text.lower()]
        except KeyError as e:
            allowed = ", ".join(tag.value for tag in cls)
            raise exp.ArgError(f'Unknown semigroup "{text}". Allowed values are: {allowed}') from e


CONTINUOUS = (SemigroupTag.GAUSSIAN, SemigroupTag.GAMMA)
DISCRETE = (SemigroupTag.POISSON, SemigroupTag.NEGBINOMIAL)


@dataclasses.dataclass(frozen=True)
class Semigroup:
    """
    GaussianN: N(0, lambda) on R.
    Gamma: x^(lambda-1) / Gamma(lambda) dx on (0, inf).
    Poisson: the Poisson(lambda) probability on N.
    NegBinomialRn: (1 - sum p)^lambda sum_i (lambda)_i / i! nu^{*i} on N^n
        with nu = sum_j p_j delta_(e_j), a probability when sum p < 1.
    """

    tag: SemigroupTag
    n: int = 1
    p: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.tag == SemigroupTag.NEGBINOMIAL:
            p = tuple(float(x) for x in self.p)
            object.__setattr__(self, "p", p)
            if len(p) != self.n:
                raise exp.DimensionError(f"NegBinomialRn on N^{self.n} needs {self.n} values of p")
            if any(x <= 0 for x in p) or sum(p) >= 1:
                msg = f"""
                NegBinomialRn needs positive p with sum(p) < 1, got p={list(p)}.
                """
                raise exp.ArgError(msg)
        else:
            if self.n != 1:
                raise exp.DimensionError(f"{self.tag.value} is implemented on the real line only")
            if self.p:
                raise exp.ArgError(f"{self.tag.value} takes no p parameter")

    @property
    def is_discrete(self) -> bool:
        return self.tag in DISCRETE

    def density(self, lam: float, x: float) -> float:
        """f(lambda, x) for the continuous semigroups"""
        if self.tag == SemigroupTag.GAUSSIAN:
            return math.exp(-x * x / (2 * lam)) / math.sqrt(2 * math.pi * lam)
        if self.tag == SemigroupTag.GAMMA:
            if x <= 0:
                return 0.0
            return math.exp((lam - 1) * math.log(x) - gammaln(lam))
        raise exp.ArgError(f"{self.tag.value} has no density with respect to Lebesgue measure")

    def log_mass(self, lam: float, k: Sequence[int]) -> float:
        """log f(lambda, k) for the discrete semigroups and lambda > 0"""
        if self.tag == SemigroupTag.POISSON:
            (kk,) = k
            return -lam + kk * math.log(lam) - gammaln(kk + 1)
        if self.tag == SemigroupTag.NEGBINOMIAL:
            total = sum(k)
            value = gammaln(lam + total) - gammaln(lam) + lam * math.log1p(-sum(self.p))
            for kj, pj in zip(k, self.p):
                value += kj * math.log(pj) - gammaln(kj + 1)
            return float(value)
        raise exp.ArgError(f"{self.tag.value} is not supported on a lattice")

    def mass(self, lam: float, k: Sequence[int]) -> float:
        """f(lambda, k), with f(0, k) the unit mass at 0"""
        if lam == 0:
            return 1.0 if not any(k) else 0.0
        return math.exp(self.log_mass(lam, k))

    def cumulant(self, lam: float, theta: Sequence[float]) -> float:
        """log of the Laplace transform of mu_lambda at theta"""
        theta = np.asarray(theta, dtype=float)
        if self.tag == SemigroupTag.GAUSSIAN:
            return float(lam * theta[0] ** 2 / 2)
        if self.tag == SemigroupTag.GAMMA:
            if theta[0] >= 0:
                raise exp.ConvergenceError(f"The Gamma Laplace transform diverges at theta={theta[0]}")
            return float(-lam * math.log(-theta[0]))
        if self.tag == SemigroupTag.POISSON:
            return float(lam * math.expm1(theta[0]))
        inner = float(np.dot(self.p, np.exp(theta)))
        if inner >= 1:
            raise exp.ConvergenceError(f"The NegBinomialRn Laplace transform diverges at theta={list(theta)}")
        return float(lam * (math.log1p(-sum(self.p)) - math.log1p(-inner)))


@dataclasses.dataclass(frozen=True)
class HElement:
    """g_c J_lambda = [[I, 0], [c^T, lambda]] with lambda > 0"""

    lam: Number
    c: Tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        if self.lam <= 0:
            raise exp.ArgError(f"lambda must be positive, got {self.lam}")

    @property
    def n(self) -> int:
        return len(self.c)

    def as_floats(self) -> Tuple[float, np.ndarray]:
        return float(self.lam), np.asarray([float(x) for x in self.c])

    def group_element(self) -> GroupElement:
        return GroupElement.h_element(self.c, self.lam)


@dataclasses.dataclass(frozen=True)
class TiltedDensity:
    """The family generated by p(lambda, c, .) built on `semigroup`"""

    semigroup: Semigroup
    h: HElement

    def __post_init__(self):
        if self.h.n != self.semigroup.n:
            raise exp.DimensionError(
                f"c has length {self.h.n} but the semigroup lives on dimension {self.semigroup.n}"
            )
