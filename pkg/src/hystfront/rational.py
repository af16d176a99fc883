"""Exact rational helpers and the "p/q" text encoding."""
from fractions import Fraction
from numbers import Rational


def q(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are rejected: a binary float almost never denotes the rational the
    caller had in mind, and silently accepting one breaks exactness downstream.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}: {value!r}")


def fmt(value) -> str:
    """Serialize as "p/q" with q > 0 and gcd(p, q) = 1 (always two parts)."""
    value = q(value)
    return f"{value.numerator}/{value.denominator}"


def parse(text: str) -> Fraction:
    return Fraction(text.strip())


def clamp(value: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return min(max(value, lo), hi)


def sign(value) -> int:
    return (value > 0) - (value < 0)
