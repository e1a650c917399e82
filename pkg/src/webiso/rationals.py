"""Exact rational scalars.

All arithmetic in the package runs on ``gmpy2.mpq``; this module is the one
place that converts user input (ints, strings, ``Fraction``) into that type
and back into the ``"p/q"`` strings used in every JSON document.
"""
from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq

__all__ = ["Q", "mpq", "qstr", "parse_rational", "ZERO", "ONE", "bit_size"]

ZERO = mpq(0)
ONE = mpq(1)


def Q(value) -> mpq:
    """Coerce ``value`` to an exact rational."""
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; pass a string or Fraction")
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def parse_rational(text: str) -> mpq:
    text = text.strip()
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc
    return mpq(frac.numerator, frac.denominator)


def qstr(value) -> str:
    """Serialize a rational as ``"p/q"`` (or ``"p"`` for integers)."""
    return str(Q(value))


def bit_size(value: mpq) -> int:
    return max(int(value.numerator).bit_length(), int(value.denominator).bit_length())
