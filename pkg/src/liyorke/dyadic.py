"""Exact dyadic rationals and their canonical "p/2^q" string form.

Every numeric value that crosses a file boundary in this package is a
dyadic rational p/2^q and is serialized as that literal string.  No
floating point is used anywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction

_DYADIC_RE = re.compile(r"^(-?\d+)/2\^(\d+)$")

ZERO = Fraction(0)
ONE = Fraction(1)


def is_dyadic(x: Fraction) -> bool:
    """True iff x (already in lowest terms) has a power-of-two denominator."""
    d = x.denominator
    return d & (d - 1) == 0


def pow2(q: int) -> Fraction:
    """2^q as an exact Fraction; q may be negative."""
    if q >= 0:
        return Fraction(1 << q)
    return Fraction(1, 1 << (-q))


def format_dyadic(x: Fraction) -> str:
    if not is_dyadic(x):
        raise ValueError(f"not a dyadic rational: {x!r}")
    q = x.denominator.bit_length() - 1
    return f"{x.numerator}/2^{q}"


def parse_dyadic(text: str) -> Fraction:
    m = _DYADIC_RE.match(text)
    if m is None:
        raise ValueError(f"malformed dyadic literal: {text!r}")
    return Fraction(int(m.group(1)), 1 << int(m.group(2)))


def largest_covering_exponent(x: Fraction) -> int:
    """Largest n with x <= 2^-n, for x > 0 (may be negative for x > 1)."""
    if x <= 0:
        raise ValueError("x must be positive")
    p, q = x.numerator, x.denominator
    if not is_dyadic(x):
        raise ValueError(f"not dyadic: {x!r}")
    return (q.bit_length() - 1) - (p - 1).bit_length()
