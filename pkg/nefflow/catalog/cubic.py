"""
Orbit classification of polynomial variance functions of degree <= 3 on R.

V(m) = a0 + a1 m + a2 m^2 + a3 m^3 is read as the binary cubic
b(X, Y) = Y^3 V(X/Y) = a3 X^3 + a2 X^2 Y + a1 X Y^2 + a0 Y^3, whose
projective root pattern over R is invariant under the group action.
The pattern is decided exactly from the discriminant and the Hessian
covariant, so no floating-point root finding is involved.
"""
import enum
from fractions import Fraction
from typing import NamedTuple, Tuple
import nefflow.common.exceptions as exp
from nefflow.algebra.poly import MultiPoly


class CubicOrbit(enum.Enum):
    X3 = "X^3"
    X2 = "X^2"
    XXp1 = "X(X+1)"
    X2p1 = "X^2+1"

    @property
    def display(self) -> str:
        return self.value


def cubic_coefficients(V: MultiPoly) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """(a0, a1, a2, a3) of a polynomial in one variable of degree <= 3"""
    if V.n != 1:
        raise exp.DimensionError(f"Cubic orbits are defined for n=1 only, got n={V.n}")
    if V.is_zero():
        raise exp.ArgError("The zero polynomial is not a variance function")
    if V.degree > 3:
        raise exp.ArgError(f"{V.to_text()} has degree {V.degree}; the cubic classes need degree <= 3")
    a0, a1, a2, a3 = (V.coefficient((i,)) for i in range(4))
    return a0, a1, a2, a3


def binary_cubic_discriminant(V: MultiPoly) -> Fraction:
    a0, a1, a2, a3 = cubic_coefficients(V)
    return (
        a2 * a2 * a1 * a1
        - 4 * a3 * a1 ** 3
        - 4 * a2 ** 3 * a0
        - 27 * a3 * a3 * a0 * a0
        + 18 * a3 * a2 * a1 * a0
    )


def hessian_coefficients(V: MultiPoly) -> Tuple[Fraction, Fraction, Fraction]:
    """
    Coefficients of the Hessian quadratic covariant, up to a constant.
    They vanish together exactly when b has a triple root.
    """
    a0, a1, a2, a3 = cubic_coefficients(V)
    return (a2 * a2 - 3 * a3 * a1, a2 * a1 - 9 * a3 * a0, a1 * a1 - 3 * a2 * a0)


def classify_cubic_orbit_n1(V: MultiPoly) -> CubicOrbit:
    delta = binary_cubic_discriminant(V)
    if delta > 0:
        return CubicOrbit.XXp1
    if delta < 0:
        return CubicOrbit.X2p1
    if all(h == 0 for h in hessian_coefficients(V)):
        return CubicOrbit.X3
    return CubicOrbit.X2


class MorrisFingerprint(NamedTuple):
    degree: int
    orbit: CubicOrbit
    quadratic_sign: int


def morris_fingerprint(V: MultiPoly) -> MorrisFingerprint:
    """
    Degree, root pattern and sign of the m^2 coefficient. The affine
    group preserves all three, so distinct fingerprints mean distinct
    affine orbits.
    """
    orbit = classify_cubic_orbit_n1(V)
    a2 = V.coefficient((2,))
    sign = (a2 > 0) - (a2 < 0)
    return MorrisFingerprint(V.degree, orbit, sign)
