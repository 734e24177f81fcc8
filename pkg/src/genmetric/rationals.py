"""Exact rational parsing and formatting shared by every document format."""

from __future__ import annotations

from fractions import Fraction
from typing import Any


class MalformedNumber(ValueError):
    pass


def parse_rational(value: Any, where: str = "value") -> Fraction:
    """Parse ``"2.5"``, ``"5/2"`` or an ``int`` into a Fraction.

    Floats and booleans are rejected: a binary float is not the number the
    author typed, and verdicts must not depend on rounding.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise MalformedNumber(f"{where}: expected a rational string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise MalformedNumber(f"{where}: expected a rational string, got {value!r}")
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise MalformedNumber(f"{where}: malformed number {value!r}") from None


def format_rational(q: Fraction) -> str:
    """Canonical text for an exact rational: ``"5/2"``, ``"3"``, ``"-1/3"``."""
    return str(Fraction(q))


def decimal_label(q: Fraction) -> str:
    """Decimal text when the expansion terminates, otherwise ``p/q``.

    Used for the coordinates of grid points, e.g. 1/4 -> ``"0.25"``.
    """
    q = Fraction(q)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return format_rational(q)
    digits = max(twos, fives)
    if digits == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * (10**digits // q.denominator)
    sign = "-" if q < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0').rstrip('0')}"
