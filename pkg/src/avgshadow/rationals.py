"""Exact interpretation of user-supplied thresholds.

Strict density inequalities must not flip on rounding, so thresholds are
compared as exact rationals.  A float is read through its shortest
round-tripping decimal form (repr), so the literal a caller types — 0.2,
0.05 — means exactly that decimal, not the nearest binary double.  Pass a
Fraction to control the threshold fully.
"""

from fractions import Fraction


def exact_threshold(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    raise TypeError(f"cannot interpret threshold of type {type(value).__name__}")
