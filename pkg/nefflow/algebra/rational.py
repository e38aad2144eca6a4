"""
Conversions between user-facing text/number formats and exact rationals.
All symbolic computation in nefflow runs on fractions.Fraction.
"""
from fractions import Fraction
from typing import Union
import nefflow.common.exceptions as exp

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike) -> Fraction:
    """
    Accept ints, Fractions and "p/q" or "p" strings. Floats are refused
    because they would silently introduce rounding.
    """
    if isinstance(value, bool):
        raise exp.ArgError(f"Expected a rational number, got the boolean {value}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise exp.ArgError(
        f"Expected an int, Fraction or rational string, got {type(value).__name__}"
    )


def parse_rational(text: str) -> Fraction:
    stripped = text.strip()
    if "." in stripped or "e" in stripped.lower():
        raise exp.ParseError(f'"{text}" is not of the form p or p/q')
    try:
        return Fraction(stripped)
    except (ValueError, ZeroDivisionError) as e:
        raise exp.ParseError(f'"{text}" is not a valid rational') from e


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
